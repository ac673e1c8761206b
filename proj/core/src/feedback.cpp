#include "pdstab/feedback.hpp"

#include "pdstab/error.hpp"

#include <cmath>

namespace pdstab {

FeedbackGain::FeedbackGain(Matrix k, Index m) : k_(std::move(k)), m_(m) {
  if (k_.rows() != k_.cols() || m_ < 0 || m_ > k_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "feedback matrix must be n x n with 0 <= m <= n");
  }
  require_finite(k_, "feedback matrix");
}

FeedbackGain FeedbackGain::diagonal(Index n, Index m, double kappa_plus, double kappa_minus) {
  Matrix k = Matrix::Zero(n, n);
  for (Index i = 0; i < n - m; ++i) k(i, i) = kappa_plus;
  for (Index i = n - m; i < n; ++i) k(i, i) = kappa_minus;
  return FeedbackGain(std::move(k), m);
}

ConditionMatrices build_condition_matrices(const Spectrum& spectrum0, const Matrix& x1, const Matrix& x2,
                                           const FeedbackGain& gain) {
  const Index n = spectrum0.n();
  const Index m = spectrum0.m;
  if (gain.n() != n || gain.m() != m) throw Error(ErrorCode::DimensionMismatch, "gain does not match spectrum");
  require_shape(x1, m, m, "X1");
  require_shape(x2, n - m, n - m, "X2");

  const Vector lm = spectrum0.lambda_minus();
  const Vector lp = spectrum0.lambda_plus();
  const Matrix x2lp = x2 * lp.asDiagonal();
  const Matrix x1lm = -(x1 * lm.asDiagonal());

  ConditionMatrices out;
  out.commutation_residual = std::max(max_norm(Matrix(x2lp - x2lp.transpose())),
                                      max_norm(Matrix(x1lm - x1lm.transpose())));

  const Matrix& k = gain.matrix();
  const Matrix d1 = block_diag(symmetrize(x2lp), symmetrize(x1lm));
  out.M1 = symmetrize(d1 - k.transpose() * d1 * k);

  const Vector exp_lp = (-lp.array()).exp().matrix();
  const Vector exp_lm = (-lm.array()).exp().matrix();
  const Matrix outgoing = block_diag(diag(exp_lp.cwiseProduct(lp)), diag(-lm));
  const Matrix incoming = block_diag(diag(lp), diag(-exp_lm.cwiseProduct(lm)));
  out.M2 = symmetrize(outgoing - k.transpose() * incoming * k);
  return out;
}

GainReport check_gain(const Spectrum& spectrum0, const Matrix& x1, const Matrix& x2, const FeedbackGain& gain,
                      double tol) {
  const ConditionMatrices c = build_condition_matrices(spectrum0, x1, x2, gain);
  GainReport rep;
  rep.M1 = c.M1;
  rep.M2 = c.M2;
  rep.commutation_residual = c.commutation_residual;
  const auto pd1 = is_positive_definite(c.M1, tol);
  const auto pd2 = is_positive_definite(c.M2, tol);
  rep.pd1 = pd1.positive;
  rep.pd2 = pd2.positive;
  rep.margin1 = pd1.margin;
  rep.margin2 = pd2.margin;
  return rep;
}

std::pair<double, double> diagonal_gain_bounds(const Spectrum& spectrum0) {
  const Vector lm = spectrum0.lambda_minus();
  const Vector lp = spectrum0.lambda_plus();
  const double plus = lp.size() > 0 ? std::exp(-lp.maxCoeff()) : 1.0;
  const double minus = lm.size() > 0 ? std::exp(lm.minCoeff()) : 1.0;
  return {plus, minus};
}

Matrix build_G(double alpha, const Spectrum& spectrum0, const Matrix& x1, const Matrix& x2,
               const FeedbackGain& gain) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::NonPositiveAlpha, "alpha must be positive");
  const ConditionMatrices c = build_condition_matrices(spectrum0, x1, x2, gain);
  return symmetrize(alpha * c.M1 + c.M2);
}

}  // namespace pdstab
