#include "pdstab/simulator.hpp"

#include "pdstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pdstab {

namespace {

bool is_spectral(ErrorCode c) {
  return c == ErrorCode::ComplexEigenvalues || c == ErrorCode::VanishingSpeed || c == ErrorCode::DefectiveMatrix ||
         c == ErrorCode::SpectralFailure;
}

}  // namespace

TransformedSystem::TransformedSystem(SystemModel model, double tol) : model_(std::move(model)), tol_(tol) {
  validate_model(model_);
  p_ = model_.P0;
  p_inv_ = invert(p_);
  spectrum0_u_ = reference_spectrum(model_, tol_);

  spectrum0_ = spectrum0_u_;
  spectrum0_.L = spectrum0_u_.L * p_inv_;
  spectrum0_.L_inv = p_ * spectrum0_u_.L_inv;

  // local_spectrum returns unit max-norm rows; this maps them back onto the reference rows.
  const Spectrum plain = normalized(spectrum0_);
  row_scale_.resize(model_.n);
  for (Index i = 0; i < model_.n; ++i) {
    Index k = 0;
    plain.L.row(i).cwiseAbs().maxCoeff(&k);
    row_scale_[i] = spectrum0_.L(i, k) / plain.L(i, k);
  }
}

Matrix TransformedSystem::A(const Vector& v) const {
  return p_.lazyProduct(model_.A(p_inv_.lazyProduct(v))).lazyProduct(p_inv_);
}

Vector TransformedSystem::B(const Vector& v) const { return p_.lazyProduct(model_.Q(p_inv_.lazyProduct(v))); }

Matrix TransformedSystem::B_V(const Vector& v) const { return p_ * model_.Q_U(p_inv_ * v) * p_inv_; }

Matrix TransformedSystem::A0(const Vector& v) const {
  return p_inv_.transpose() * model_.A0(p_inv_ * v) * p_inv_;
}

Matrix TransformedSystem::A_dir(const Vector& v, const Vector& w) const {
  return p_ * directional_derivative(model_, p_inv_ * v, p_inv_ * w) * p_inv_;
}

Spectrum TransformedSystem::local_spectrum_unscaled(const Vector& v) const {
  return refine_spectrum(A(v), spectrum0_, tol_);
}

Spectrum TransformedSystem::local_spectrum_unscaled(const Vector& v, const Spectrum& guess) const {
  return refine_spectrum(A(v), guess, tol_);
}

Spectrum TransformedSystem::local_spectrum(const Vector& v) const {
  return rescale_rows(local_spectrum_unscaled(v), row_scale_);
}

Matrix TransformedSystem::to_V(const Matrix& u_field) const {
  require_shape(u_field, u_field.rows(), n(), "U field");
  return u_field * p_.transpose();
}

Matrix TransformedSystem::to_U(const Matrix& v_field) const {
  require_shape(v_field, v_field.rows(), n(), "V field");
  return v_field * p_inv_.transpose();
}

void SimConfig::validate() const {
  if (!(cfl > 0.0 && cfl < 1.0)) throw Error(ErrorCode::InvalidConfig, "cfl must lie in (0,1)");
  if (N < 16) throw Error(ErrorCode::InvalidConfig, "N must be at least 16");
  if (reconstruction_order != 1 && reconstruction_order != 2) {
    throw Error(ErrorCode::InvalidConfig, "reconstruction_order must be 1 or 2");
  }
  if (output_stride < 1) throw Error(ErrorCode::InvalidConfig, "output_stride must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidConfig, "t_end must be finite and >= 0");
  if (!(blowup_factor > 1.0)) throw Error(ErrorCode::InvalidConfig, "blowup_factor must exceed 1");
  if (!(upwind_kappa >= -1.0 && upwind_kappa <= 1.0)) throw Error(ErrorCode::InvalidConfig, "upwind_kappa must lie in [-1, 1]");
  if (!(blowup_floor > 0.0)) throw Error(ErrorCode::InvalidConfig, "blowup_floor must be positive");
}

Vector GridState::at(Index i) const {
  if (i >= 0 && i < N) return V.row(i).transpose();
  if (i == -1 || i == -2) return ghost_left.row(-i - 1).transpose();
  if (i == N || i == N + 1) return ghost_right.row(i - N).transpose();
  throw Error(ErrorCode::DimensionMismatch, "cell index out of range");
}

Vector BoundaryTraces::xi_left() const {
  Vector x(xi_out_left.size() + xi_in_left.size());
  x << xi_out_left, xi_in_left;
  return x;
}

Vector BoundaryTraces::xi_right() const {
  Vector x(xi_in_right.size() + xi_out_right.size());
  x << xi_in_right, xi_out_right;
  return x;
}

Simulator::Simulator(TransformedSystem system, FeedbackGain gain, SimConfig config)
    : system_(std::move(system)), gain_(std::move(gain)), config_(config) {
  config_.validate();
  if (gain_.n() != system_.n() || gain_.m() != system_.m()) {
    throw Error(ErrorCode::DimensionMismatch, "feedback gain does not match the system");
  }
}

GridState Simulator::make_state(const Matrix& v0) const {
  require_shape(v0, config_.N, system_.n(), "initial field");
  require_finite(v0, "initial field");
  GridState s;
  s.N = config_.N;
  s.dx = 1.0 / static_cast<double>(config_.N);
  s.V = v0;
  const double norm0 = max_norm(v0);
  s.blowup_cap = config_.blowup_factor * std::max(norm0, config_.blowup_floor);
  apply_boundary(s);
  return s;
}

Matrix Simulator::sample(const std::function<Vector(double)>& f) const {
  const double dx = 1.0 / static_cast<double>(config_.N);
  Matrix out(config_.N, system_.n());
  for (Index i = 0; i < config_.N; ++i) {
    out.row(i) = f((static_cast<double>(i) + 0.5) * dx).transpose();
  }
  return out;
}

BoundaryTraces Simulator::build_traces(const Matrix& v, Matrix* ghost_left, Matrix* ghost_right) const {
  const Spectrum& s0 = system_.spectrum0();
  const Index n = system_.n();
  const Index m = system_.m();
  const Index N = v.rows();

  const Vector xi0 = s0.L * v.row(0).transpose();
  const Vector xiN = s0.L * v.row(N - 1).transpose();
  Vector left = xi0;
  Vector right = xiN;
  if (config_.reconstruction_order == 2) {
    left = 0.5 * (3.0 * xi0 - s0.L * v.row(1).transpose());
    right = 0.5 * (3.0 * xiN - s0.L * v.row(N - 2).transpose());
  }

  BoundaryTraces tr;
  tr.xi_out_left = left.head(m);
  tr.xi_out_right = right.tail(n - m);
  Vector outgoing(n);
  outgoing << tr.xi_out_right, tr.xi_out_left;
  const Vector incoming = gain_.incoming(outgoing);
  tr.xi_in_left = incoming.head(n - m);
  tr.xi_in_right = incoming.tail(m);

  Vector check(n);
  check << tr.xi_in_left, tr.xi_in_right;
  tr.residual = max_norm(Vector(check - gain_.incoming(outgoing)));

  const Vector b_left = tr.xi_left();
  const Vector b_right = tr.xi_right();
  tr.V_left = s0.L_inv * b_left;
  tr.V_right = s0.L_inv * b_right;

  if (ghost_left != nullptr) {
    ghost_left->resize(2, n);
    ghost_left->row(0) = (s0.L_inv * (2.0 * b_left - xi0)).transpose();
    ghost_left->row(1) = (s0.L_inv * (4.0 * b_left - 3.0 * xi0)).transpose();
  }
  if (ghost_right != nullptr) {
    ghost_right->resize(2, n);
    ghost_right->row(0) = (s0.L_inv * (2.0 * b_right - xiN)).transpose();
    ghost_right->row(1) = (s0.L_inv * (4.0 * b_right - 3.0 * xiN)).transpose();
  }
  return tr;
}

BoundaryTraces Simulator::apply_boundary(GridState& state) const {
  return build_traces(state.V, &state.ghost_left, &state.ghost_right);
}

BoundaryTraces Simulator::traces(const GridState& state) const { return build_traces(state.V, nullptr, nullptr); }

Matrix Simulator::rhs(const GridState& state) const { return rhs(state, nullptr); }

Matrix Simulator::rhs(const GridState& state, double* max_speed) const {
  const Index N = state.N;
  const Index n = system_.n();
  const double inv_dx = 1.0 / state.dx;

  // Extended field: row j holds cell j - 2.
  Matrix ext(N + 4, n);
  ext.row(0) = state.ghost_left.row(1);
  ext.row(1) = state.ghost_left.row(0);
  ext.middleRows(2, N) = state.V;
  ext.row(N + 2) = state.ghost_right.row(0);
  ext.row(N + 3) = state.ghost_right.row(1);

  // MUSCL-kappa difference for a positive speed, weights on cells i+1, i, i-1, i-2.
  const double kappa = config_.upwind_kappa;
  const double c[4] = {0.25 * (1.0 + kappa), 0.75 * (1.0 - kappa), 0.25 * (3.0 * kappa - 5.0), 0.25 * (1.0 - kappa)};

  Matrix out(N, n);
  Matrix w(5, n);
  Vector dw(n);
  double speed = 0.0;
  Spectrum s = system_.spectrum0();
  for (Index i = 0; i < N; ++i) {
    const Vector v = state.V.row(i).transpose();
    s = system_.local_spectrum_unscaled(v, s);
    speed = std::max(speed, s.lambda.cwiseAbs().maxCoeff());
    w.noalias() = ext.middleRows(i, 5).lazyProduct(s.L.transpose());  // rows: cells i-2 .. i+2
    for (Index k = 0; k < n; ++k) {
      const double lam = s.lambda[k];
      if (config_.reconstruction_order == 1) {
        dw[k] = lam > 0.0 ? w(2, k) - w(1, k) : w(3, k) - w(2, k);
      } else if (lam > 0.0) {
        dw[k] = c[0] * w(3, k) + c[1] * w(2, k) + c[2] * w(1, k) + c[3] * w(0, k);
      } else {
        dw[k] = -(c[0] * w(1, k) + c[1] * w(2, k) + c[2] * w(3, k) + c[3] * w(4, k));
      }
      dw[k] *= lam * inv_dx;
    }
    // A(V) D_x V = L^{-1} Lambda (L D_x V).
    out.row(i) = (system_.B(v) - s.L_inv.lazyProduct(dw)).transpose();
  }
  if (max_speed != nullptr) *max_speed = speed;
  return out;
}

double Simulator::cfl_dt(const GridState& state, double cfl) const {
  double speed = 0.0;
  for (Index i = 0; i < state.N; ++i) {
    const Spectrum s = system_.local_spectrum_unscaled(state.V.row(i).transpose());
    speed = std::max(speed, s.lambda.cwiseAbs().maxCoeff());
  }
  if (!(speed > 0.0)) throw Error(ErrorCode::VanishingSpeed, "all characteristic speeds vanish");
  return cfl * state.dx / speed;
}

GridState Simulator::step(const GridState& state, double dt) const {
  if (dt == 0.0) return state;
  return step_from(state, dt, rhs(state));
}

GridState Simulator::step_from(const GridState& state, double dt, const Matrix& k1) const {
  auto check = [&](const GridState& s) {
    if (!s.V.allFinite() || max_norm(s.V) > s.blowup_cap) {
      throw Error(ErrorCode::BlowUp, "state exceeded the blow-up cap at t = " + std::to_string(state.t + dt));
    }
  };
  GridState s1 = state;
  s1.V = state.V + dt * k1;
  check(s1);
  apply_boundary(s1);

  GridState s2 = state;
  s2.V = 0.75 * state.V + 0.25 * (s1.V + dt * rhs(s1));
  check(s2);
  apply_boundary(s2);

  GridState s3 = state;
  s3.V = (1.0 / 3.0) * state.V + (2.0 / 3.0) * (s2.V + dt * rhs(s2));
  check(s3);
  apply_boundary(s3);
  s3.t = state.t + dt;
  return s3;
}

namespace {

void central_differences(const Matrix& V, double dx, Matrix& d1, Matrix& d2) {
  const Index N = V.rows();
  d1.resize(N, V.cols());
  d2.resize(N, V.cols());
  for (Index i = 1; i + 1 < N; ++i) {
    d1.row(i) = (V.row(i + 1) - V.row(i - 1)) / (2.0 * dx);
    d2.row(i) = (V.row(i + 1) - 2.0 * V.row(i) + V.row(i - 1)) / (dx * dx);
  }
  d1.row(0) = (-3.0 * V.row(0) + 4.0 * V.row(1) - V.row(2)) / (2.0 * dx);
  d1.row(N - 1) = (3.0 * V.row(N - 1) - 4.0 * V.row(N - 2) + V.row(N - 3)) / (2.0 * dx);
  d2.row(0) = (2.0 * V.row(0) - 5.0 * V.row(1) + 4.0 * V.row(2) - V.row(3)) / (dx * dx);
  d2.row(N - 1) = (2.0 * V.row(N - 1) - 5.0 * V.row(N - 2) + 4.0 * V.row(N - 3) - V.row(N - 4)) / (dx * dx);
}

}  // namespace

TimeDerivatives Simulator::time_derivatives(const GridState& state) const {
  return time_derivatives(state, config_.derivative_scheme);
}

TimeDerivatives Simulator::time_derivatives(const GridState& state, DerivativeScheme scheme) const {
  const Index N = state.N;
  const Index n = system_.n();
  const Matrix& V = state.V;

  TimeDerivatives d;
  central_differences(V, state.dx, d.V_x, d.V_xx);

  if (scheme == DerivativeScheme::SemiDiscrete) {
    GridState s = state;
    apply_boundary(s);
    d.V_t = rhs(s);
    const double vt_norm = max_norm(d.V_t);
    if (vt_norm == 0.0) {
      d.V_tt = Matrix::Zero(N, n);
    } else {
      const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(max_norm(V), 1e-300) / vt_norm;
      GridState plus = state;
      plus.V = V + h * d.V_t;
      apply_boundary(plus);
      GridState minus = state;
      minus.V = V - h * d.V_t;
      apply_boundary(minus);
      d.V_tt = (rhs(plus) - rhs(minus)) / (2.0 * h);
    }
    Matrix unused;
    central_differences(d.V_t, state.dx, d.V_tx, unused);
    return d;
  }

  d.V_t.resize(N, n);
  d.V_tx.resize(N, n);
  d.V_tt.resize(N, n);
  for (Index i = 0; i < N; ++i) {
    const Vector v = V.row(i).transpose();
    const Vector vx = d.V_x.row(i).transpose();
    const Vector vxx = d.V_xx.row(i).transpose();
    const Matrix a = system_.A(v);
    const Matrix bv = system_.B_V(v);
    const Vector vt = system_.B(v) - a * vx;
    const Vector vtx = -a * vxx + bv * vx - system_.A_dir(v, vx) * vx;
    const Vector vtt = -a * vtx + bv * vt - system_.A_dir(v, vt) * vx;
    d.V_t.row(i) = vt.transpose();
    d.V_tx.row(i) = vtx.transpose();
    d.V_tt.row(i) = vtt.transpose();
  }
  return d;
}

std::pair<double, double> Simulator::compatibility_residuals(const GridState& state) const {
  const Spectrum& s0 = system_.spectrum0();
  const Index n = system_.n();
  const Index m = system_.m();

  auto law_residual = [&](const Vector& xi_left, const Vector& xi_right) {
    Vector outgoing(n);
    outgoing << xi_right.tail(n - m), xi_left.head(m);
    Vector incoming(n);
    incoming << xi_left.tail(n - m), xi_right.head(m);
    return max_norm(Vector(incoming - gain_.incoming(outgoing)));
  };

  auto extrapolate = [&](const Matrix& f, bool left) {
    const Index N = f.rows();
    if (config_.reconstruction_order == 1) return Vector(f.row(left ? 0 : N - 1).transpose());
    if (left) return Vector((1.5 * f.row(0) - 0.5 * f.row(1)).transpose());
    return Vector((1.5 * f.row(N - 1) - 0.5 * f.row(N - 2)).transpose());
  };

  const double r0 = law_residual(s0.L * extrapolate(state.V, true), s0.L * extrapolate(state.V, false));
  const TimeDerivatives d = time_derivatives(state);
  const double r1 = law_residual(s0.L * extrapolate(d.V_t, true), s0.L * extrapolate(d.V_t, false));
  return {r0, r1};
}

Trajectory Simulator::run(const Matrix& v0) const {
  Trajectory traj;
  GridState state = make_state(v0);

  const auto [r0, r1] = compatibility_residuals(state);
  if (r0 > config_.compatibility_tol) {
    traj.warnings.push_back("initial data violate the feedback law at t = 0 (residual " + std::to_string(r0) + ")");
  }
  if (r1 > config_.compatibility_tol) {
    traj.warnings.push_back("initial time derivative violates the differentiated feedback law (residual " +
                            std::to_string(r1) + ")");
  }

  auto record = [&](const GridState& s, Index step) {
    Snapshot snap;
    snap.state = s;
    snap.traces = traces(s);
    snap.step = step;
    traj.samples.push_back(std::move(snap));
  };

  record(state, 0);
  traj.max_abs_V = max_norm(state.V);
  Index steps = 0;
  const double t_end = config_.t_end;
  try {
    while (state.t < t_end) {
      if (steps >= config_.max_steps) {
        traj.warnings.push_back("max_steps reached before t_end");
        break;
      }
      // The first stage's rhs also yields the CFL speed of the current state.
      double speed = 0.0;
      const Matrix k1 = rhs(state, &speed);
      if (!(speed > 0.0)) throw Error(ErrorCode::VanishingSpeed, "all characteristic speeds vanish");
      double dt = config_.cfl * state.dx / speed;
      bool last = false;
      if (state.t + dt >= t_end * (1.0 - 1e-14)) {
        dt = t_end - state.t;
        last = true;
      }
      state = step_from(state, dt, k1);
      if (last) state.t = t_end;
      ++steps;
      traj.max_abs_V = std::max(traj.max_abs_V, max_norm(state.V));
      const double res = traces(state).residual;
      traj.max_boundary_residual = std::max(traj.max_boundary_residual, res);
      if (steps % config_.output_stride == 0 || last) record(state, steps);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BlowUp) {
      traj.termination = Termination::BlowUp;
    } else if (is_spectral(e.code())) {
      traj.termination = Termination::SpectralFailure;
    } else {
      throw;
    }
    traj.message = e.what();
    if (traj.samples.empty() || traj.samples.back().step != steps) record(state, steps);
  }
  traj.steps = steps;
  return traj;
}

}  // namespace pdstab
