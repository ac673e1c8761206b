#include "pdstab/affine_model.hpp"

#include "pdstab/error.hpp"

#include <memory>

namespace pdstab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

void require_square(const Matrix& m, Index n, const std::string& what) {
  require(m.rows() == n && m.cols() == n, what + " must be " + std::to_string(n) + " x " + std::to_string(n));
  require(m.allFinite(), what + " has non-finite entries");
}

Matrix spectral_symmetrizer(const Matrix& a, const Spectrum& guess) {
  const Spectrum s = refine_spectrum(a, guess);
  return s.L.transpose() * s.L;
}

}  // namespace

void validate(const AffineModelSpec& spec) {
  const Index n = spec.n;
  require(n >= 1, "n must be positive");
  require(spec.r >= 1 && spec.r <= n, "r must lie in [1, n]");
  require_square(spec.A_const, n, "A_const");
  require(spec.A_lin.empty() || static_cast<Index>(spec.A_lin.size()) == n, "A_lin needs n matrices");
  for (const Matrix& a : spec.A_lin) require_square(a, n, "A_lin entry");
  require_square(spec.J, n, "J");
  require(spec.H.empty() || static_cast<Index>(spec.H.size()) == n, "H needs n matrices");
  for (const Matrix& h : spec.H) require_square(h, n, "H entry");
  require(spec.d.size() == 0 || spec.d.size() == n, "d must have n entries");
  require(spec.d.allFinite(), "d has non-finite entries");
  if (spec.A0) require_square(*spec.A0, n, "A0");
  if (spec.P0) require_square(*spec.P0, n, "P0");
  if (spec.R) require_square(*spec.R, spec.r, "R");
}

SystemModel make_affine_model(const AffineModelSpec& spec_in) {
  validate(spec_in);
  auto spec = std::make_shared<AffineModelSpec>(spec_in);
  for (Matrix& h : spec->H) h = symmetrize(h);
  if (spec->d.size() == 0) spec->d = Vector::Zero(spec->n);
  const Index n = spec->n;

  const Spectrum s0 = spectral_decompose(spec->A_const);

  SystemModel model;
  model.name = spec->name;
  model.n = n;
  model.m = s0.m;
  model.r = spec->r;
  model.A = [spec](const Vector& u) {
    Matrix a = spec->A_const;
    for (std::size_t k = 0; k < spec->A_lin.size(); ++k) a += u[static_cast<Index>(k)] * spec->A_lin[k];
    return a;
  };
  model.A_dir = [spec](const Vector&, const Vector& w) {
    Matrix a = Matrix::Zero(spec->n, spec->n);
    for (std::size_t k = 0; k < spec->A_lin.size(); ++k) a += w[static_cast<Index>(k)] * spec->A_lin[k];
    return a;
  };
  auto numerator = [spec](const Vector& u) {
    Vector q = spec->J * u;
    for (std::size_t i = 0; i < spec->H.size(); ++i) q[static_cast<Index>(i)] += u.dot(spec->H[i] * u);
    return q;
  };
  model.Q = [spec, numerator](const Vector& u) {
    const double den = 1.0 + spec->d.dot(u);
    if (!(den > 0.0)) throw Error(ErrorCode::InvalidParameters, "source denominator 1 + d.U must stay positive");
    return Vector(numerator(u) / den);
  };
  model.Q_U = [spec, numerator](const Vector& u) {
    const double den = 1.0 + spec->d.dot(u);
    if (!(den > 0.0)) throw Error(ErrorCode::InvalidParameters, "source denominator 1 + d.U must stay positive");
    Matrix jac = spec->J;
    for (std::size_t i = 0; i < spec->H.size(); ++i) {
      jac.row(static_cast<Index>(i)) += 2.0 * (spec->H[i] * u).transpose();
    }
    return Matrix(jac / den - numerator(u) * spec->d.transpose() / (den * den));
  };
  if (spec->A0) {
    const Matrix a0 = symmetrize(*spec->A0);
    model.A0 = [a0](const Vector&) { return a0; };
  } else {
    model.A0 = [model_a = model.A, s0](const Vector& u) { return spectral_symmetrizer(model_a(u), s0); };
  }
  model.P0 = spec->P0 ? *spec->P0 : Matrix::Identity(n, n);
  const Matrix transformed = model.P0 * spec->J * invert(model.P0);
  model.S0 = transformed.bottomRightCorner(spec->r, spec->r);
  model.R = spec->R;
  return model;
}

}  // namespace pdstab
