#include "pdstab/matrixcore.hpp"

#include "pdstab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace pdstab {

double max_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_shape(const Matrix& m, Index rows, Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix block_diag(const Matrix& upper_left, const Matrix& lower_right) {
  Matrix out = Matrix::Zero(upper_left.rows() + lower_right.rows(), upper_left.cols() + lower_right.cols());
  out.topLeftCorner(upper_left.rows(), upper_left.cols()) = upper_left;
  out.bottomRightCorner(lower_right.rows(), lower_right.cols()) = lower_right;
  return out;
}

Matrix diag(const Vector& v) { return v.asDiagonal(); }

namespace {

// Row i of L is scaled so that its largest-magnitude entry (first on ties)
// becomes +1; L_inv columns absorb the inverse scale.
void normalize_rows(Spectrum& s) {
  for (Index i = 0; i < s.n(); ++i) {
    Index arg = 0;
    double best = -1.0;
    for (Index j = 0; j < s.L.cols(); ++j) {
      const double v = std::abs(s.L(i, j));
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    const double scale = s.L(i, arg);
    s.L.row(i) /= scale;
    s.L_inv.col(i) *= scale;
  }
}

void check_speeds(const Vector& lambda, double scale, double tol) {
  for (Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda[i]) <= tol * scale) {
      throw Error(ErrorCode::VanishingSpeed,
                  "eigenvalue " + std::to_string(i) + " = " + std::to_string(lambda[i]));
    }
  }
}

Index count_negative(const Vector& lambda) {
  Index m = 0;
  for (Index i = 0; i < lambda.size(); ++i) m += lambda[i] < 0.0 ? 1 : 0;
  return m;
}

}  // namespace

Spectrum spectral_decompose(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral_decompose needs a square matrix");
  require_finite(a, "flux Jacobian");
  const Index n = a.rows();
  const double scale = max_norm(a);
  if (scale == 0.0) throw Error(ErrorCode::VanishingSpeed, "zero matrix");

  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SpectralFailure, "QR iteration did not converge");

  const Eigen::VectorXcd& values = solver.eigenvalues();
  for (Index i = 0; i < n; ++i) {
    if (std::abs(values[i].imag()) > tol * scale) {
      throw Error(ErrorCode::ComplexEigenvalues, "eigenvalue " + std::to_string(values[i].real()) + " + " +
                                                     std::to_string(values[i].imag()) + "i");
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return values[x].real() < values[y].real(); });

  Spectrum s;
  s.lambda.resize(n);
  Matrix right(n, n);
  for (Index k = 0; k < n; ++k) {
    s.lambda[k] = values[order[static_cast<std::size_t>(k)]].real();
    right.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]).real();
  }
  check_speeds(s.lambda, scale, tol);

  Eigen::JacobiSVD<Matrix> svd(right);
  const Vector& sv = svd.singularValues();
  if (sv[n - 1] <= 0.0 || sv[0] / sv[n - 1] > 1.0 / tol) {
    throw Error(ErrorCode::DefectiveMatrix, "eigenvector matrix is numerically singular");
  }

  s.L_inv = right;
  s.L = right.fullPivLu().inverse();
  s.m = count_negative(s.lambda);
  normalize_rows(s);
  return s;
}

namespace {

constexpr int kSmall = 8;

// Heap-free storage for the systems of interest; larger ones fall back to dynamic sizes.
template <int MaxN>
using Work = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, MaxN, MaxN>;

template <class M>
std::optional<Spectrum> refine_impl(const Matrix& a_in, const Spectrum& guess, double scale) {
  const Index n = a_in.rows();
  constexpr int kMaxIterations = 10;
  const double floor = 1e-10 * scale;
  const double target = 1e-14 * scale;

  const M a = a_in;
  M left = guess.L;
  M right = guess.L_inv;
  M t = left * a * right;
  M e = M::Zero(n, n);
  double previous = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double off = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j) off = std::max(off, std::abs(t(i, j)));
    if (off <= target || (off <= floor && off > 0.5 * previous)) {
      converged = true;
      break;
    }
    previous = off;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i == j) {
          e(i, j) = 1.0;
          continue;
        }
        const double gap = t(j, j) - t(i, i);
        // Off-diagonal mass has to be small against the gap for the iteration to converge.
        if (std::abs(gap) < 1e-6 * scale || std::abs(t(i, j)) > 0.25 * std::abs(gap)) return std::nullopt;
        e(i, j) = t(i, j) / gap;
      }
    }
    right = (right * e).eval();
    left = e.partialPivLu().solve(left);
    t = left * a * right;
  }
  if (!converged) return std::nullopt;

  std::array<Index, kSmall> small_order{};
  std::vector<Index> big_order;
  Index* order = small_order.data();
  if (n > kSmall) {
    big_order.resize(static_cast<std::size_t>(n));
    order = big_order.data();
  }
  std::iota(order, order + n, Index{0});
  std::stable_sort(order, order + n, [&](Index x, Index y) { return t(x, x) < t(y, y); });

  Spectrum s;
  s.lambda.resize(n);
  s.L.resize(n, n);
  s.L_inv.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[k];
    s.lambda[k] = t(src, src);
    s.L.row(k) = left.row(src);
    s.L_inv.col(k) = right.col(src);
  }
  return s;
}

}  // namespace

Spectrum refine_spectrum(const Matrix& a, const Spectrum& guess, double tol) {
  const Index n = a.rows();
  if (a.cols() != n || guess.n() != n || guess.L.rows() != n) return spectral_decompose(a, tol);
  const double scale = max_norm(a);
  if (scale == 0.0 || !a.allFinite()) return spectral_decompose(a, tol);

  std::optional<Spectrum> s;
  switch (n) {
    case 2: s = refine_impl<Eigen::Matrix2d>(a, guess, scale); break;
    case 3: s = refine_impl<Eigen::Matrix3d>(a, guess, scale); break;
    case 4: s = refine_impl<Eigen::Matrix4d>(a, guess, scale); break;
    default:
      s = n <= kSmall ? refine_impl<Work<kSmall>>(a, guess, scale) : refine_impl<Matrix>(a, guess, scale);
  }
  if (!s) return spectral_decompose(a, tol);
  check_speeds(s->lambda, scale, tol);
  s->m = count_negative(s->lambda);
  normalize_rows(*s);
  return std::move(*s);
}

Spectrum normalized(Spectrum s) {
  normalize_rows(s);
  return s;
}

Spectrum rescale_rows(const Spectrum& s, const Vector& row_scale) {
  Spectrum out = s;
  for (Index i = 0; i < s.n(); ++i) {
    out.L.row(i) *= row_scale[i];
    out.L_inv.col(i) /= row_scale[i];
  }
  return out;
}

double eigen_residual(const Matrix& a, const Spectrum& s) {
  return max_norm(Matrix(s.L * a - s.lambda.asDiagonal() * s.L));
}

DefinitenessResult is_positive_definite(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "is_positive_definite needs a square matrix");
  require_finite(m, "matrix");
  DefinitenessResult r;
  if (m.size() == 0) {
    r.positive = true;
    r.margin = std::numeric_limits<double>::infinity();
    return r;
  }
  r.asymmetry = max_norm(Matrix(0.5 * (m - m.transpose())));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  r.margin = solver.eigenvalues().minCoeff();
  r.positive = r.margin > tol;
  return r;
}

Matrix invert(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "invert needs a square matrix");
  require_finite(m, "matrix");
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(tol);
  if (!lu.isInvertible()) throw Error(ErrorCode::Singular, "matrix is singular to working precision");
  return lu.inverse();
}

Blocks partition(const Matrix& m, Index row_split, Index col_split) {
  if (row_split < 0 || row_split > m.rows() || col_split < 0 || col_split > m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "block split outside matrix");
  }
  const Index r1 = m.rows() - row_split;
  const Index c1 = m.cols() - col_split;
  return Blocks{m.topLeftCorner(row_split, col_split), m.topRightCorner(row_split, c1),
                m.bottomLeftCorner(r1, col_split), m.bottomRightCorner(r1, c1)};
}

}  // namespace pdstab
