#pragma once

// Method-of-lines solver for the closed loop in the variables V = P(0) U:
//
//   V_t + A(V) V_x = B(V),  A(V) = P A(P^{-1}V) P^{-1},  B(V) = P Q(P^{-1}V)
//
// on a uniform cell-centred grid of (0,1) with two ghost layers per side.
// Interior derivatives are upwinded field by field in the local
// characteristic variables of A(V_i); boundary data use the frozen
// variables xi = L(0) V, with incoming traces set by the feedback matrix.

#include "pdstab/feedback.hpp"
#include "pdstab/matrixcore.hpp"
#include "pdstab/structure.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pdstab {

/// The model rewritten in V = P0 U, with its reference spectrum.
class TransformedSystem {
 public:
  explicit TransformedSystem(SystemModel model, double tol = kDefaultSpectralTol);

  const SystemModel& model() const { return model_; }
  Index n() const { return model_.n; }
  Index m() const { return spectrum0_.m; }
  /// Split point of V = (v1, v2), v1 in R^{n-r}.
  Index split() const { return model_.n - model_.r; }

  const Matrix& P() const { return p_; }
  const Matrix& P_inv() const { return p_inv_; }

  Matrix A(const Vector& v) const;
  Vector B(const Vector& v) const;
  Matrix B_V(const Vector& v) const;
  Matrix A0(const Vector& v) const;
  /// A'(V)W in V coordinates.
  Matrix A_dir(const Vector& v, const Vector& w) const;

  /// Reference spectrum of the original A(0): L(0), Lambda(0).
  const Spectrum& spectrum0_U() const { return spectrum0_u_; }
  /// The same in V coordinates: L(0) P^{-1} and P L(0)^{-1}.
  const Spectrum& spectrum0() const { return spectrum0_; }

  /// Left eigenvectors of A(V); rows scaled to agree with spectrum0() at V = 0.
  Spectrum local_spectrum(const Vector& v) const;
  /// As local_spectrum, without the reference scaling (interior upwinding only).
  Spectrum local_spectrum_unscaled(const Vector& v) const;
  /// Same, refined from a nearby spectrum (e.g. the neighbouring cell).
  Spectrum local_spectrum_unscaled(const Vector& v, const Spectrum& guess) const;

  /// Row-wise maps of N x n fields.
  Matrix to_V(const Matrix& u_field) const;
  Matrix to_U(const Matrix& v_field) const;

 private:
  SystemModel model_;
  double tol_;
  Matrix p_;
  Matrix p_inv_;
  Spectrum spectrum0_u_;
  Spectrum spectrum0_;
  Vector row_scale_;
};

enum class DerivativeScheme {
  Central2,      // V_x, V_xx by central differences, then the PDE identities
  SemiDiscrete,  // V_t = rhs(V), V_tt = rhs'(V) V_t, both with the boundary closure
};

struct SimConfig {
  Index N = 200;
  double cfl = 0.5;
  double t_end = 1.0;
  Index output_stride = 10;
  double blowup_factor = 1e6;      // cap = factor * max(initial max-norm, blowup_floor)
  double blowup_floor = 1e-6;
  int reconstruction_order = 2;    // 1: first-order upwind, copied traces; 2: MUSCL-kappa stencil, linear traces
  double upwind_kappa = 1.0 / 3.0; // order 2 only: 0 Fromm, 1/3 third-order upwind-biased, -1 fully upwind
  DerivativeScheme derivative_scheme = DerivativeScheme::SemiDiscrete;
  double compatibility_tol = 1e-8;
  Index max_steps = 50'000'000;

  /// Error{InvalidConfig} unless cfl in (0,1), N >= 16, order in {1,2}, stride >= 1.
  void validate() const;
};

struct GridState {
  Index N = 0;
  double dx = 0.0;
  double t = 0.0;
  Matrix V;            // N x n
  Matrix ghost_left;   // row 0 at cell -1, row 1 at cell -2
  Matrix ghost_right;  // row 0 at cell N, row 1 at cell N+1
  double blowup_cap = std::numeric_limits<double>::infinity();

  double x(Index i) const { return (static_cast<double>(i) + 0.5) * dx; }
  /// Value at cell index i in [-2, N+1].
  Vector at(Index i) const;
};

struct BoundaryTraces {
  Vector xi_out_left;   // xi_-(t,0), m
  Vector xi_out_right;  // xi_+(t,1), n-m
  Vector xi_in_left;    // xi_+(t,0), n-m
  Vector xi_in_right;   // xi_-(t,1), m
  Vector V_left;        // V(t,0) = L(0)^{-1} xi(t,0)
  Vector V_right;       // V(t,1)
  double residual = 0.0;  // |(xi_+(0); xi_-(1)) - K (xi_+(1); xi_-(0))|_max

  Vector xi_left() const;   // (xi_-(t,0); xi_+(t,0))
  Vector xi_right() const;  // (xi_-(t,1); xi_+(t,1))
};

struct TimeDerivatives {
  Matrix V_x;
  Matrix V_xx;
  Matrix V_t;
  Matrix V_tx;
  Matrix V_tt;
};

struct Snapshot {
  GridState state;
  BoundaryTraces traces;
  Index step = 0;
};

enum class Termination { Completed, BlowUp, SpectralFailure };

struct Trajectory {
  std::vector<Snapshot> samples;
  Termination termination = Termination::Completed;
  std::string message;
  std::vector<std::string> warnings;
  Index steps = 0;
  double max_boundary_residual = 0.0;  // over every accepted step
  double max_abs_V = 0.0;              // over every accepted step
};

class Simulator {
 public:
  Simulator(TransformedSystem system, FeedbackGain gain, SimConfig config);

  const TransformedSystem& system() const { return system_; }
  const FeedbackGain& gain() const { return gain_; }
  const SimConfig& config() const { return config_; }

  /// State at t = 0 with ghosts filled and the blow-up cap fixed. v0 is N x n.
  GridState make_state(const Matrix& v0) const;
  /// Cell-centre samples of a function of x.
  Matrix sample(const std::function<Vector(double)>& f) const;

  /// Extrapolates outgoing traces, sets incoming ones through K and writes ghosts.
  BoundaryTraces apply_boundary(GridState& state) const;
  /// Traces for the current ghosts without modifying the state.
  BoundaryTraces traces(const GridState& state) const;

  /// dV/dt per cell; requires current ghosts. Error{SpectralFailure} on
  /// leaving the hyperbolic region.
  Matrix rhs(const GridState& state) const;
  /// As rhs, also reporting max |lambda_i(V)| over cells and fields.
  Matrix rhs(const GridState& state, double* max_speed) const;

  /// cfl * dx / max |lambda_i(V)|; Error{VanishingSpeed} if every speed is zero.
  double cfl_dt(const GridState& state, double cfl) const;

  /// One SSP-RK3 step; ghosts re-applied at every stage. Error{BlowUp}.
  GridState step(const GridState& state, double dt) const;

  /// V_x, V_xx by second-order differences on the interior cells
  /// (one-sided at the ends). Central2 then takes V_t, V_tx, V_tt from the
  /// PDE identities; SemiDiscrete takes V_t = rhs(V) and V_tt as the
  /// derivative of rhs along V_t (central difference, ghosts rebuilt), with
  /// V_tx the difference quotient of V_t.
  TimeDerivatives time_derivatives(const GridState& state) const;
  TimeDerivatives time_derivatives(const GridState& state, DerivativeScheme scheme) const;

  /// Residual of the feedback law on the interior-extrapolated traces and on
  /// their time derivatives at t = 0.
  std::pair<double, double> compatibility_residuals(const GridState& state) const;

  Trajectory run(const Matrix& v0) const;

 private:
  BoundaryTraces build_traces(const Matrix& v, Matrix* ghost_left, Matrix* ghost_right) const;
  GridState step_from(const GridState& state, double dt, const Matrix& k1) const;

  TransformedSystem system_;
  FeedbackGain gain_;
  SimConfig config_;
};

}  // namespace pdstab
