#include "pdstab/lyapunov.hpp"

#include "pdstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdstab {

namespace {

Matrix exp_weight(const Vector& lambda0, double x) { return (-lambda0.array() * x).exp().matrix().asDiagonal(); }

double quadratic_sum(const Matrix& f, const std::vector<Matrix>& w, double dx) {
  double s = 0.0;
  for (Index i = 0; i < f.rows(); ++i) {
    const Vector d = f.row(i).transpose();
    s += d.dot(w[static_cast<std::size_t>(i)] * d);
  }
  return s * dx;
}

double largest_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

Matrix weight_matrix(const TransformedSystem& system, const Vector& v, double x, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::NonPositiveAlpha, "alpha must be positive");
  const Spectrum s = system.local_spectrum(v);
  const Matrix l = s.L;
  return symmetrize(alpha * system.A0(v) + l.transpose() * exp_weight(system.spectrum0().lambda, x) * l);
}

LyapunovValues evaluate(const TransformedSystem& system, const GridState& state, const Matrix& V_t,
                        const Matrix& V_tt, double alpha) {
  require_shape(V_t, state.V.rows(), state.V.cols(), "V_t");
  require_shape(V_tt, state.V.rows(), state.V.cols(), "V_tt");
  std::vector<Matrix> w(static_cast<std::size_t>(state.N));
  LyapunovValues out;
  out.c1 = std::numeric_limits<double>::infinity();
  out.c2 = 0.0;
  for (Index i = 0; i < state.N; ++i) {
    Matrix wi = weight_matrix(system, state.V.row(i).transpose(), state.x(i), alpha);
    Eigen::SelfAdjointEigenSolver<Matrix> es(wi, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > 0.0)) {
      throw Error(ErrorCode::NonPDWeight, "weight matrix not positive definite at cell " + std::to_string(i));
    }
    out.c1 = std::min(out.c1, lo);
    out.c2 = std::max(out.c2, es.eigenvalues().maxCoeff());
    w[static_cast<std::size_t>(i)] = std::move(wi);
  }
  out.L0 = quadratic_sum(state.V, w, state.dx);
  out.L1 = quadratic_sum(V_t, w, state.dx);
  out.L2 = quadratic_sum(V_tt, w, state.dx);
  return out;
}

H2Energy discrete_h2_energy(const Matrix& V, const Matrix& V_t, const Matrix& V_tt, Index split, double dx) {
  require_shape(V_t, V.rows(), V.cols(), "V_t");
  require_shape(V_tt, V.rows(), V.cols(), "V_tt");
  const Index r = V.cols() - split;
  H2Energy e;
  e.E_v1 = dx * (V.leftCols(split).squaredNorm() + V_t.leftCols(split).squaredNorm() +
                 V_tt.leftCols(split).squaredNorm());
  e.E_v2 = dx * (V.rightCols(r).squaredNorm() + V_t.rightCols(r).squaredNorm() + V_tt.rightCols(r).squaredNorm());
  e.E = dx * (V.squaredNorm() + V_t.squaredNorm() + V_tt.squaredNorm());
  return e;
}

bool LyapunovSample::bracketed() const {
  const double slack = 1e-12 * std::max(1.0, std::abs(Ltotal));
  return c1 * E_H2 <= Ltotal * (1.0 + 1e-12) + slack && Ltotal <= c2 * E_H2 * (1.0 + 1e-12) + slack;
}

DecayFit fit_decay_rate(const LyapunovTrace& trace, std::pair<double, double> window) {
  std::vector<double> t;
  std::vector<double> y;
  for (const LyapunovSample& s : trace.samples) {
    if (s.t < window.first || s.t > window.second) continue;
    if (!(s.E_H2 > 0.0) || !(s.Ltotal > 0.0)) {
      throw Error(ErrorCode::NonPositiveEnergy, "non-positive energy at t = " + std::to_string(s.t));
    }
    t.push_back(s.t);
    y.push_back(std::log(s.E_H2));
  }
  if (t.size() < 10) {
    throw Error(ErrorCode::InsufficientSamples,
                "fit window holds " + std::to_string(t.size()) + " samples, need at least 10");
  }
  const auto count = static_cast<double>(t.size());
  double tm = 0.0;
  double ym = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    tm += t[k];
    ym += y[k];
  }
  tm /= count;
  ym /= count;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    sty += (t[k] - tm) * (y[k] - ym);
  }
  if (!(stt > 0.0)) throw Error(ErrorCode::InsufficientSamples, "fit window has no time spread");

  DecayFit fit;
  fit.slope = sty / stt;
  fit.intercept = ym - fit.slope * tm;
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double e = y[k] - (fit.intercept + fit.slope * t[k]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / count);
  fit.nu_hat = -0.5 * fit.slope;
  fit.t_lo = t.front();
  fit.t_hi = t.back();
  fit.fit_range = std::abs(fit.slope) * (fit.t_hi - fit.t_lo);
  fit.samples = static_cast<Index>(t.size());
  return fit;
}

double max_relative_increase(const LyapunovTrace& trace, std::size_t first) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = first; k + 1 < trace.samples.size(); ++k) {
    const double a = trace.samples[k].Ltotal;
    const double b = trace.samples[k + 1].Ltotal;
    if (a > 0.0) {
      worst = std::max(worst, b / a - 1.0);
    } else if (b > 0.0) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

AlphaChoice default_alpha(const TransformedSystem& system, int x_samples) {
  if (x_samples < 2) throw Error(ErrorCode::InvalidConfig, "need at least two x samples");
  const Index n = system.n();
  const Vector zero = Vector::Zero(n);
  const Spectrum& s0 = system.spectrum0();
  const Matrix& l = s0.L;
  const Matrix bv = system.B_V(zero);
  const Matrix c = l * bv * s0.L_inv;
  const Matrix a0 = system.A0(zero);
  const Matrix d = symmetrize(a0 * bv + bv.transpose() * a0);
  const Matrix lam2 = (s0.lambda.array().square()).matrix().asDiagonal();

  std::vector<Matrix> base;
  base.reserve(static_cast<std::size_t>(x_samples));
  for (int k = 0; k < x_samples; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(x_samples - 1);
    const Matrix e = exp_weight(s0.lambda, x);
    base.push_back(symmetrize(l.transpose() * (-lam2 * e + e * c + c.transpose() * e) * l));
  }
  auto worst = [&](double alpha) {
    double w = -std::numeric_limits<double>::infinity();
    for (const Matrix& b : base) w = std::max(w, largest_eigenvalue(b + alpha * d));
    return w;
  };

  AlphaChoice out;
  out.x_samples = x_samples;
  double lo = 0.0;
  double hi = 1.0;
  if (worst(0.0) < 0.0) {
    hi = 0.0;
  } else {
    while (!(worst(hi) < 0.0)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) throw Error(ErrorCode::AssumptionViolated, "no alpha below 1e12 makes the interior dissipative");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (worst(mid) < 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  out.alpha_star = hi;
  out.alpha = std::max(1.0, 2.0 * hi);
  out.interior_margin = -worst(out.alpha);
  return out;
}

LyapunovTrace build_trace(const Simulator& sim, const Trajectory& trajectory, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::NonPositiveAlpha, "alpha must be positive");
  const TransformedSystem& sys = sim.system();
  LyapunovTrace trace;
  trace.alpha = alpha;
  trace.samples.reserve(trajectory.samples.size());
  for (const Snapshot& snap : trajectory.samples) {
    const TimeDerivatives d = sim.time_derivatives(snap.state);
    const LyapunovValues lv = evaluate(sys, snap.state, d.V_t, d.V_tt, alpha);
    const H2Energy e = discrete_h2_energy(snap.state.V, d.V_t, d.V_tt, sys.split(), snap.state.dx);
    LyapunovSample s;
    s.t = snap.state.t;
    s.L0 = lv.L0;
    s.L1 = lv.L1;
    s.L2 = lv.L2;
    s.Ltotal = lv.L0 + lv.L1 + lv.L2;
    s.E_H2 = e.E;
    s.E_v1 = e.E_v1;
    s.E_v2 = e.E_v2;
    s.c1 = lv.c1;
    s.c2 = lv.c2;
    trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace pdstab
