#include "pdstab/sve.hpp"

#include "pdstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdstab::sve {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParameters, what);
}

double rel(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

// prod_{k != j} (lambda_j - lambda_k)
double vandermonde_row(const std::array<double, 3>& l, int j) {
  double d = 1.0;
  for (int k = 0; k < 3; ++k)
    if (k != j) d *= l[static_cast<std::size_t>(j)] - l[static_cast<std::size_t>(k)];
  return d;
}

}  // namespace

void validate(const SveParameters& p) {
  require(p.g > 0.0, "g must be positive");
  require(p.a > 0.0, "a must be positive");
  require(p.H_star > 0.0, "H_star must be positive");
  require(p.V_star > 0.0, "V_star must be positive");
  require(p.C_f >= 0.0, "C_f must be non-negative");
  const double lhs = p.g * p.S_b * p.H_star;
  const double rhs = p.C_f * p.V_star * p.V_star;
  require(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1e-300) || (lhs == 0.0 && rhs == 0.0),
          "equilibrium balance g S_b H* = C_f V*^2 violated");
}

SveParameters make_equilibrium(double g, double a, double H_star, double V_star, double C_f) {
  SveParameters p;
  p.g = g;
  p.a = a;
  p.H_star = H_star;
  p.V_star = V_star;
  p.C_f = C_f;
  require(g > 0.0 && H_star > 0.0, "g and H_star must be positive");
  p.S_b = C_f * V_star * V_star / (g * H_star);
  validate(p);
  return p;
}

SveParameters from_values(double g, double a, double H_star, double V_star, double C_f, std::optional<double> S_b,
                          double B_star, double balance_tol) {
  SveParameters p = make_equilibrium(g, a, H_star, V_star, C_f);
  p.B_star = B_star;
  if (S_b) {
    require(rel(*S_b, p.S_b) <= balance_tol || (*S_b == 0.0 && p.S_b == 0.0),
            "S_b = " + std::to_string(*S_b) + " does not balance C_f (expected " + std::to_string(p.S_b) + ")");
  }
  return p;
}

SveParameters reference_parameters() { return make_equilibrium(9.81, 0.005, 1.0, 1.0, 0.01); }

Matrix flux_jacobian(const Vector& u, const SveParameters& p) {
  const double hh = u[0] + p.H_star;
  const double vv = u[2] + p.V_star;
  Matrix a(3, 3);
  a << vv, 0.0, hh,
       0.0, 0.0, p.a * vv * vv,
       p.g, p.g, vv;
  return a;
}

Matrix flux_jacobian_directional(const Vector& u, const Vector& w, const SveParameters& p) {
  const double vv = u[2] + p.V_star;
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = w[2];
  d(0, 2) = w[0];
  d(1, 2) = 2.0 * p.a * vv * w[2];
  d(2, 2) = w[2];
  return d;
}

Vector source(const Vector& u, const SveParameters& p) {
  const double hh = u[0] + p.H_star;
  if (!(hh > 0.0)) throw Error(ErrorCode::DryBed, "water depth h + H* <= 0");
  const double vv = u[2] + p.V_star;
  Vector q = Vector::Zero(3);
  // g S_b written as C_f V*^2 / H* so that Q(0) = 0 exactly
  q[2] = p.C_f * (p.V_star * p.V_star * hh - vv * vv * p.H_star) / (p.H_star * hh);
  return q;
}

Matrix source_jacobian(const Vector& u, const SveParameters& p) {
  const double hh = u[0] + p.H_star;
  if (!(hh > 0.0)) throw Error(ErrorCode::DryBed, "water depth h + H* <= 0");
  const double vv = u[2] + p.V_star;
  Matrix j = Matrix::Zero(3, 3);
  j(2, 0) = p.C_f * vv * vv / (hh * hh);
  j(2, 2) = -2.0 * p.C_f * vv / hh;
  return j;
}

Matrix symmetrizer(const Vector& u, const SveParameters& p) {
  const double hh = u[0] + p.H_star;
  const double vv = u[2] + p.V_star;
  const double g = p.g;
  Matrix a0(3, 3);
  a0 << (4.0 * g * hh + 2.0 * p.a * g * vv * vv) / (4.0 * hh * hh), -g / (2.0 * hh), -vv / (2.0 * hh),
        -g / (2.0 * hh), 3.0 * g / (2.0 * p.a * vv * vv), 0.0,
        -vv / (2.0 * hh), 0.0, 1.0;
  return a0;
}

VietaResiduals vieta_residuals(const std::array<double, 3>& l, const SveParameters& p) {
  const double v = p.V_star;
  const double gav2 = p.g * p.a * v * v;
  const double pairwise = v * v - gav2 - p.g * p.H_star;
  VietaResiduals r;
  r.product = rel(l[0] * l[1] * l[2], -gav2 * v);
  r.sum = rel(l[0] + l[1] + l[2], 2.0 * v);
  r.pairwise = std::abs(l[0] * l[1] + l[0] * l[2] + l[1] * l[2] - pairwise) /
               std::max({std::abs(pairwise), v * v, p.g * p.H_star});
  return r;
}

std::array<double, 3> characteristic_roots(const SveParameters& p) {
  validate(p);
  const double v = p.V_star;
  const double c2 = -2.0 * v;
  const double c1 = v * v - p.g * p.a * v * v - p.g * p.H_star;
  const double c0 = p.g * p.a * v * v * v;
  Matrix companion(3, 3);
  companion << -c2, -c1, -c0,
               1.0, 0.0, 0.0,
               0.0, 1.0, 0.0;
  Spectrum s;
  try {
    s = spectral_decompose(companion, 1e-12);
  } catch (const Error& e) {
    throw Error(ErrorCode::AssumptionViolated, std::string("characteristic cubic: ") + e.what());
  }
  const std::array<double, 3> l{s.lambda[0], s.lambda[1], s.lambda[2]};
  const VietaResiduals res = vieta_residuals(l, p);
  if (std::max({res.product, res.sum, res.pairwise}) > 1e-10) {
    throw Error(ErrorCode::SpectralFailure, "companion roots fail the Vieta relations");
  }
  if (!(l[0] < 0.0 && 0.0 < l[1] && l[1] <= l[2])) {
    throw Error(ErrorCode::AssumptionViolated, "speeds are not ordered lambda1 < 0 < lambda2 <= lambda3");
  }
  if (!(l[1] < -l[0] && l[1] < 1.5 * v)) {
    throw Error(ErrorCode::AssumptionViolated, "sediment speed lambda2 is not small against -lambda1 and 1.5 V*");
  }
  return l;
}

StructuralMatrices structural_matrices(const SveParameters& p) {
  const std::array<double, 3> l = characteristic_roots(p);
  const double h = p.H_star;
  const double v = p.V_star;
  StructuralMatrices s;
  s.P0 = Matrix::Identity(3, 3);
  s.P0(2, 0) = -v / (2.0 * h);
  s.A00 = symmetrizer(Vector::Zero(3), p);

  const Matrix& a = s.A00;
  s.det_cofactor = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                   a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                   a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  double prod = 1.0;
  for (double li : l) prod *= li - 1.5 * v;
  s.det_product = p.g / (p.a * h * h * v * v * v) * prod;
  if (!is_positive_definite(s.A00).positive) throw Error(ErrorCode::AssumptionViolated, "A0(0) is not SPD");
  return s;
}

EigenvectorMatrices eigvector_matrices(const SveParameters& p) {
  const std::array<double, 3> l = characteristic_roots(p);
  const double v = p.V_star;
  EigenvectorMatrices e;
  e.L0.resize(3, 3);
  e.L0_inv.resize(3, 3);
  for (int j = 0; j < 3; ++j) {
    const double lj = l[static_cast<std::size_t>(j)];
    const double d = vandermonde_row(l, j);
    e.L0(j, 0) = p.g / (lj - v);
    e.L0(j, 1) = p.g / lj;
    e.L0(j, 2) = 1.0;
    e.L0_inv(0, j) = lj * p.H_star / d;
    e.L0_inv(1, j) = p.a * v * v * (lj - v) / d;
    e.L0_inv(2, j) = lj * (lj - v) / d;
    e.X[static_cast<std::size_t>(j)] = lj * (lj - 1.5 * v) / d;
  }
  e.X_quadratic = e.L0_inv.transpose() * symmetrizer(Vector::Zero(3), p) * e.L0_inv;
  return e;
}

Spectrum spectrum(const SveParameters& p) {
  const std::array<double, 3> l = characteristic_roots(p);
  const EigenvectorMatrices e = eigvector_matrices(p);
  Spectrum s;
  s.lambda = Vector::Map(l.data(), 3);
  s.m = 1;
  s.L = e.L0;
  s.L_inv = e.L0_inv;
  return s;
}

SveSpectralData spectral_data(const SveParameters& p) {
  const EigenvectorMatrices e = eigvector_matrices(p);
  SveSpectralData d;
  d.lambda = characteristic_roots(p);
  d.X = e.X;
  const double x11 = d.X[0];
  d.beta2 = std::max(d.X[1] / x11, 1.0);
  d.beta3 = std::max(d.X[2] / x11, 1.0);
  d.eta2 = std::max(x11 / d.X[1], std::exp(d.lambda[1] - d.lambda[0]));
  d.eta3 = std::max(x11 / d.X[2], std::exp(d.lambda[2] - d.lambda[0]));
  return d;
}

namespace {

constexpr double kSingularFeedbackTol = 1e-12;

void require_denominator(double d, double g, const char* what) {
  if (std::abs(d) <= kSingularFeedbackTol * g) throw Error(ErrorCode::SingularFeedback, what);
}

}  // namespace

double pi(int j, double k1, const SveParameters& p) {
  const std::array<double, 3> l = characteristic_roots(p);
  const double v = p.V_star;
  const double lj = l.at(static_cast<std::size_t>(j - 1));
  const double den = p.g - k1 * (l[0] - v);
  require_denominator(den, p.g, "g - k1 (lambda1 - V*) vanishes");
  return (l[0] - v) / (lj - v) * (p.g - k1 * (lj - v)) / den;
}

double chi(int j, double k2, const SveParameters& p) {
  const std::array<double, 3> l = characteristic_roots(p);
  const double v = p.V_star;
  const double den = p.g + k2 * (l[0] - v);
  require_denominator(den, p.g, "g + k2 (lambda1 - V*) vanishes");
  const double l1 = l[0];
  const double l2 = l[1];
  const double l3 = l[2];
  if (j == 2) return l2 * (l3 - l1) * (l2 - v) / (l1 * (l3 - l2) * (l1 - v)) * (p.g + k2 * (l2 - v)) / den;
  if (j == 3) return l3 * (l1 - l2) * (l3 - v) / (l1 * (l3 - l2) * (l1 - v)) * (p.g + k2 * (l3 - v)) / den;
  throw Error(ErrorCode::DimensionMismatch, "chi index must be 2 or 3");
}

Matrix boundary_ordering_to_toolkit(const Matrix& k_boundary_order) {
  // Position of (xi2, xi3, xi1) entries inside (xi_+; xi_-) = (xi2, xi3; xi1).
  Matrix perm = Matrix::Zero(3, 3);
  perm(0, 0) = 1.0;
  perm(1, 1) = 1.0;
  perm(2, 2) = 1.0;
  return perm * k_boundary_order * perm.transpose();
}

FeedbackGain feedback_matrix(double k1, double k2, const SveParameters& p) {
  Matrix k = Matrix::Zero(3, 3);
  k(0, 2) = pi(2, k1, p);
  k(1, 2) = pi(3, k1, p);
  k(2, 0) = chi(2, k2, p);
  k(2, 1) = chi(3, k2, p);
  return FeedbackGain(boundary_ordering_to_toolkit(k), 1);
}

AdmissibilityReport gain_admissible(double k1, double k2, const SveParameters& p, AdmissibilityMode mode) {
  const SveSpectralData d = spectral_data(p);
  const double l1 = std::abs(d.lambda[0]);
  const double l2 = d.lambda[1];
  const double l3 = d.lambda[2];
  const double x11 = d.X[0];
  const double x22 = d.X[1];
  const double x33 = d.X[2];
  const double p2 = pi(2, k1, p);
  const double p3 = pi(3, k1, p);
  const double c2 = chi(2, k2, p);
  const double c3 = chi(3, k2, p);

  const std::vector<double> exact{
      p2 * p2 * (x22 / x11) * (l2 / l1) + p3 * p3 * (x33 / x11) * (l3 / l1),
      c2 * c2 * (x11 / x22) * (l1 / l2) + c3 * c3 * (x11 / x33) * (l1 / l3),
      p2 * p2 * (l2 / l1) + p3 * p3 * (l3 / l1),
      c2 * c2 * std::exp(l2 + l1) * (l1 / l2) + c3 * c3 * std::exp(l3 + l1) * (l1 / l3),
  };
  const std::vector<double> sufficient{
      p2 * p2 * d.beta2 * (l2 / l1) + p3 * p3 * d.beta3 * (l3 / l1),
      c2 * c2 * d.eta2 * (l1 / l2) + c3 * c3 * d.eta3 * (l1 / l3),
  };
  auto all_below_one = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x <= 1.0; });
  };

  AdmissibilityReport rep;
  rep.mode = mode;
  rep.lhs = mode == AdmissibilityMode::Exact ? exact : sufficient;
  for (double x : rep.lhs) rep.pass.push_back(x <= 1.0);
  rep.passed = all_below_one(rep.lhs);
  rep.implication_holds = !all_below_one(sufficient) || all_below_one(exact);
  return rep;
}

bool admissible_exact(double k1, double k2, const SveParameters& p) {
  return gain_admissible(k1, k2, p, AdmissibilityMode::Exact).passed;
}

bool admissible_sufficient(double k1, double k2, const SveParameters& p) {
  return gain_admissible(k1, k2, p, AdmissibilityMode::Sufficient).passed;
}

SystemModel as_system_model(const SveParameters& p) {
  validate(p);
  const StructuralMatrices sm = structural_matrices(p);
  SystemModel model;
  model.name = "sve";
  model.n = 3;
  model.m = 1;
  model.r = 1;
  model.A = [p](const Vector& u) { return flux_jacobian(u, p); };
  model.Q = [p](const Vector& u) { return source(u, p); };
  model.Q_U = [p](const Vector& u) { return source_jacobian(u, p); };
  model.A0 = [p](const Vector& u) { return symmetrizer(u, p); };
  model.A_dir = [p](const Vector& u, const Vector& w) { return flux_jacobian_directional(u, w, p); };
  model.P0 = sm.P0;
  model.S0 = Matrix::Constant(1, 1, -2.0 * p.C_f * p.V_star / p.H_star);
  model.R = Matrix::Constant(1, 1, 2.0 * p.C_f * p.V_star / p.H_star);
  model.reference_spectrum = spectrum(p);
  return model;
}

double physical_boundary_residual(const Vector& u_left, const Vector& u_right, double k1, double k2) {
  return std::max({std::abs(u_left[1]), std::abs(u_left[2] + k1 * u_left[0]),
                   std::abs(u_right[2] + k2 * (u_right[0] + u_right[1]))});
}

}  // namespace pdstab::sve
