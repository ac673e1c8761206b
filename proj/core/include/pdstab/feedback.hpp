#pragma once

// Boundary feedback (xi_+(t,0); xi_-(t,1)) = K (xi_+(t,1); xi_-(t,0)) and the
// two positive-definiteness conditions on K that guarantee H2 decay.
//
// Block convention: incoming and outgoing vectors both list the n-m positive
// fields first, then the m negative ones. The unit interval is hard-coded in
// the exponential weights; other lengths must be rescaled into (0,1), which
// multiplies the speeds by 1/length.

#include "pdstab/matrixcore.hpp"

#include <utility>

namespace pdstab {

class FeedbackGain {
 public:
  /// Error{DimensionMismatch} unless k is n x n with 0 <= m <= n.
  FeedbackGain(Matrix k, Index m);

  static FeedbackGain zero(Index n, Index m) { return FeedbackGain(Matrix::Zero(n, n), m); }

  /// K00 = kappa_plus I, K11 = kappa_minus I, off-diagonal blocks zero.
  static FeedbackGain diagonal(Index n, Index m, double kappa_plus, double kappa_minus);

  const Matrix& matrix() const { return k_; }
  Index n() const { return k_.rows(); }
  Index m() const { return m_; }

  Matrix k00() const { return k_.topLeftCorner(n() - m_, n() - m_); }
  Matrix k01() const { return k_.topRightCorner(n() - m_, m_); }
  Matrix k10() const { return k_.bottomLeftCorner(m_, n() - m_); }
  Matrix k11() const { return k_.bottomRightCorner(m_, m_); }

  /// (xi_+(t,0); xi_-(t,1)) from (xi_+(t,1); xi_-(t,0)).
  Vector incoming(const Vector& outgoing) const { return k_ * outgoing; }

 private:
  Matrix k_;
  Index m_;
};

struct ConditionMatrices {
  Matrix M1;  // weights from A0: diag(X2 L+, -X1 L-) - K^T diag(X2 L+, -X1 L-) K
  Matrix M2;  // weights from L^T e^{-Lambda x} L at x = 0, 1
  double commutation_residual = 0.0;  // asymmetry of X2 L+ and X1 L- before symmetrization
};

ConditionMatrices build_condition_matrices(const Spectrum& spectrum0, const Matrix& x1, const Matrix& x2,
                                           const FeedbackGain& gain);

struct GainReport {
  Matrix M1;
  Matrix M2;
  bool pd1 = false;
  bool pd2 = false;
  double margin1 = 0.0;
  double margin2 = 0.0;
  double commutation_residual = 0.0;

  bool passed() const { return pd1 && pd2; }
};

/// Both condition matrices are tested with is_positive_definite(., tol);
/// margins are absolute smallest eigenvalues and are filled in on failure too.
GainReport check_gain(const Spectrum& spectrum0, const Matrix& x1, const Matrix& x2, const FeedbackGain& gain,
                      double tol = 0.0);

/// (exp(-max positive speed), exp(min negative speed)): strict upper bounds on
/// kappa_+^2 and kappa_-^2 for FeedbackGain::diagonal with X1 = X2 = I.
std::pair<double, double> diagonal_gain_bounds(const Spectrum& spectrum0);

/// alpha * M1 + M2, the quadratic form of the boundary terms; Error{NonPositiveAlpha}.
Matrix build_G(double alpha, const Spectrum& spectrum0, const Matrix& x1, const Matrix& x2,
               const FeedbackGain& gain);

}  // namespace pdstab
