#pragma once

// Weighted Lyapunov functionals along simulated trajectories:
//
//   L_k(t) = int_0^1 D^T W(V, x) D dx,  D = V, V_t, V_tt  (k = 0, 1, 2)
//   W(V, x) = alpha A0(V) + L(V)^T exp(-Lambda(0) x) L(V)
//
// with midpoint quadrature on the cell centres, the matching discrete H2
// energy, and a log-linear fit of the decay rate.

#include "pdstab/matrixcore.hpp"
#include "pdstab/simulator.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pdstab {

/// Error{NonPositiveAlpha} unless alpha > 0; propagates spectral errors.
Matrix weight_matrix(const TransformedSystem& system, const Vector& v, double x, double alpha);

struct LyapunovValues {
  double L0 = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double c1 = 0.0;  // smallest weight eigenvalue over the cells
  double c2 = 0.0;  // largest
};

/// Error{NonPDWeight} if some cell weight is not positive definite.
LyapunovValues evaluate(const TransformedSystem& system, const GridState& state, const Matrix& V_t,
                        const Matrix& V_tt, double alpha);

struct H2Energy {
  double E = 0.0;
  double E_v1 = 0.0;  // first n - r components
  double E_v2 = 0.0;  // last r components
};

H2Energy discrete_h2_energy(const Matrix& V, const Matrix& V_t, const Matrix& V_tt, Index split, double dx);

struct LyapunovSample {
  double t = 0.0;
  double L0 = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double Ltotal = 0.0;
  double E_H2 = 0.0;
  double E_v1 = 0.0;
  double E_v2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  /// c1 E_H2 <= Ltotal <= c2 E_H2 up to rounding.
  bool bracketed() const;
};

struct DecayFit {
  double nu_hat = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual = 0.0;   // RMS of ln E_H2 about the fitted line
  double slope = 0.0;
  double intercept = 0.0;
  double fit_range = 0.0;  // |slope| (t_hi - t_lo), the span of the fitted line
  Index samples = 0;
};

struct LyapunovTrace {
  double alpha = 1.0;
  std::vector<LyapunovSample> samples;
  std::optional<DecayFit> fit;
};

/// Least squares of ln E_H2 against t over samples with t in [t_lo, t_hi].
///
/// Errors: InsufficientSamples (fewer than 10 in the window),
/// NonPositiveEnergy (some E_H2 or Ltotal <= 0 in the window).
DecayFit fit_decay_rate(const LyapunovTrace& trace, std::pair<double, double> window);

/// Largest relative increase Ltotal(t_{k+1}) / Ltotal(t_k) - 1 over samples
/// k >= first; negative when strictly decreasing.
double max_relative_increase(const LyapunovTrace& trace, std::size_t first = 1);

struct AlphaChoice {
  double alpha = 1.0;
  double alpha_star = 0.0;     // threshold of the linearized interior balance
  double interior_margin = 0.0;  // -max_x lambda_max(N(x, alpha))
  int x_samples = 0;
};

/// Default alpha = max(1, 2 alpha*), where alpha* is the smallest alpha
/// making the linearized interior density
///
///   N(x, alpha) = L^T (-Lambda^2 E + E C + C^T E) L + alpha (A0 B_V + B_V^T A0),
///   E = exp(-Lambda x),  C = L B_V L^{-1}   (all at V = 0)
///
/// negative definite on a grid of [0, 1]. N is nonincreasing in alpha, so
/// alpha* is found by bisection. Error{AssumptionViolated} if no alpha
/// below 1e12 works.
AlphaChoice default_alpha(const TransformedSystem& system, int x_samples = 201);

/// Evaluates every snapshot of the trajectory; derivatives from the PDE.
LyapunovTrace build_trace(const Simulator& sim, const Trajectory& trajectory, double alpha);

}  // namespace pdstab
