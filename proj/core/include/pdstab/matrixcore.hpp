#pragma once

// Small dense kernels shared by every algebraic check: real eigendecomposition
// of flux Jacobians, positive-definiteness margins, inverses and 2x2 block
// partitioning. Sizes of interest are n <= 10.

#include <Eigen/Dense>

#include <string_view>

namespace pdstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance used by spectral_decompose when none is given.
inline constexpr double kDefaultSpectralTol = 1e-9;

double max_norm(const Matrix& m);
double max_norm(const Vector& v);

/// Throws Error{NonFinite} if any entry is NaN or Inf.
void require_finite(const Matrix& m, std::string_view what);
void require_finite(const Vector& v, std::string_view what);

/// Throws Error{DimensionMismatch} unless m is rows x cols.
void require_shape(const Matrix& m, Index rows, Index cols, std::string_view what);

Matrix symmetrize(const Matrix& m);
Matrix block_diag(const Matrix& upper_left, const Matrix& lower_right);
Matrix diag(const Vector& v);

/// Real eigenstructure of a diagonalizable matrix with nonzero eigenvalues.
///
/// `lambda` is sorted ascending; the first `m` entries are negative. Row i of
/// `L` is a left eigenvector for lambda[i]; `L_inv` is its inverse, so its
/// columns are the matching right eigenvectors.
struct Spectrum {
  Vector lambda;
  Index m = 0;
  Matrix L;
  Matrix L_inv;

  Index n() const { return lambda.size(); }
  Vector lambda_minus() const { return lambda.head(m); }
  Vector lambda_plus() const { return lambda.tail(n() - m); }
};

/// Eigendecomposition of a real square matrix with real, nonzero spectrum.
///
/// Rows of L are scaled to unit max-norm with the largest-magnitude entry
/// positive. Equal eigenvalues are sorted stably and accepted as long as the
/// eigenvector basis stays well conditioned.
///
/// Errors: ComplexEigenvalues if some |Im lambda| > tol*|A|_max,
/// VanishingSpeed if some |lambda| <= tol*|A|_max, DefectiveMatrix if the
/// eigenvector matrix has condition number > 1/tol.
Spectrum spectral_decompose(const Matrix& a, double tol = kDefaultSpectralTol);

/// Same contract as spectral_decompose, starting from a nearby eigenbasis.
///
/// Runs a quadratically convergent similarity iteration from `guess`; falls
/// back to spectral_decompose when the guess is too far off or eigenvalue
/// gaps are too small for the iteration to be trusted.
Spectrum refine_spectrum(const Matrix& a, const Spectrum& guess,
                         double tol = kDefaultSpectralTol);

/// Applies the unit max-norm, positive-sign row convention to `s`.
Spectrum normalized(Spectrum s);

/// Rescales the rows of `s.L` (and columns of `s.L_inv`) by `row_scale`.
Spectrum rescale_rows(const Spectrum& s, const Vector& row_scale);

/// Max-norm residual of L*A - diag(lambda)*L.
double eigen_residual(const Matrix& a, const Spectrum& s);

struct DefinitenessResult {
  bool positive = false;
  double margin = 0.0;      // smallest eigenvalue of (M + M^T)/2
  double asymmetry = 0.0;   // |(M - M^T)/2|_max
};

/// Positive-definiteness of the symmetric part of m: true iff margin > tol.
DefinitenessResult is_positive_definite(const Matrix& m, double tol = 0.0);

/// Inverse by fully pivoted LU; Error{Singular} if some pivot falls below
/// tol times the largest pivot.
Matrix invert(const Matrix& m, double tol = 1e-13);

struct Blocks {
  Matrix b00, b01, b10, b11;
};

/// Splits m after `row_split` rows and `col_split` columns.
Blocks partition(const Matrix& m, Index row_split, Index col_split);

}  // namespace pdstab
