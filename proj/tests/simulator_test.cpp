#include "pdstab/affine_model.hpp"
#include "pdstab/error.hpp"
#include "pdstab/simulator.hpp"
#include "pdstab/sve.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pdstab;

namespace {

constexpr double kPi = std::numbers::pi;

// A = diag(speeds), Q(V) = j V, A0 = I.
SystemModel diagonal_model(const Vector& speeds, const Matrix& j) {
  AffineModelSpec s;
  s.n = speeds.size();
  s.r = 1;
  s.A_const = diag(speeds);
  s.J = j;
  s.A0 = Matrix::Identity(s.n, s.n);
  return make_affine_model(s);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double bump(double x, double center, double width) {
  const double s = (x - center) / width;
  if (std::abs(s) >= 0.5) return 0.0;
  return std::pow(std::cos(kPi * s), 4);
}

SimConfig config(Index N, double t_end) {
  SimConfig c;
  c.N = N;
  c.t_end = t_end;
  c.output_stride = 1000000;
  return c;
}

Simulator sve_simulator(double k1, double k2, SimConfig c) {
  const auto p = sve::reference_parameters();
  return Simulator(TransformedSystem(sve::as_system_model(p)), sve::feedback_matrix(k1, k2, p), c);
}

}  // namespace

TEST(SimConfig, Validation) {
  SimConfig c;
  EXPECT_NO_THROW(c.validate());
  c.cfl = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = SimConfig{};
  c.N = 8;
  EXPECT_THROW(c.validate(), Error);
  c = SimConfig{};
  c.reconstruction_order = 3;
  EXPECT_THROW(c.validate(), Error);
  c = SimConfig{};
  c.output_stride = 0;
  EXPECT_THROW(c.validate(), Error);
  c = SimConfig{};
  c.upwind_kappa = 2.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(TransformedSystem, SveChangeOfVariables) {
  const auto p = sve::reference_parameters();
  TransformedSystem sys(sve::as_system_model(p));
  Matrix u(2, 3);
  u << 0.1, 0.2, 0.3, -0.4, 0.5, -0.6;
  const Matrix v = sys.to_V(u);
  for (Index i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(v(i, 0), u(i, 0));
    EXPECT_DOUBLE_EQ(v(i, 1), u(i, 1));
    EXPECT_NEAR(v(i, 2), u(i, 2) - p.V_star * u(i, 0) / (2.0 * p.H_star), 1e-16);
  }
  EXPECT_LE(max_norm(Matrix(sys.to_U(v) - u)), 1e-16);
  EXPECT_EQ(sys.split(), 2);
}

TEST(TransformedSystem, RoundTripAndNormalForm) {
  const auto p = sve::reference_parameters();
  TransformedSystem sys(sve::as_system_model(p));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  Matrix u(20, 3);
  for (Index i = 0; i < u.rows(); ++i)
    for (Index j = 0; j < 3; ++j) u(i, j) = d(rng);
  EXPECT_LE(max_norm(Matrix(sys.to_U(sys.to_V(u)) - u)), 1e-13 * max_norm(u));

  Matrix expected = Matrix::Zero(3, 3);
  expected(2, 2) = sys.model().S0(0, 0);
  EXPECT_LE(max_norm(Matrix(sys.B_V(Vector::Zero(3)) - expected)), 1e-14);
  EXPECT_EQ(max_norm(sys.B(Vector::Zero(3))), 0.0);
}

TEST(TransformedSystem, LocalSpectrumAgreesWithReferenceAtZero) {
  const auto p = sve::reference_parameters();
  TransformedSystem sys(sve::as_system_model(p));
  const Spectrum a = sys.local_spectrum(Vector::Zero(3));
  EXPECT_LE(max_norm(Matrix(a.L - sys.spectrum0().L)), 1e-10 * max_norm(sys.spectrum0().L));
  Vector v(3);
  v << 1e-3, -2e-3, 5e-4;
  const Spectrum s = sys.local_spectrum(v);
  EXPECT_LE(eigen_residual(sys.A(v), s), 1e-10 * max_norm(s.L) * max_norm(sys.A(v)));
}

TEST(ApplyBoundary, ZeroGainAbsorbs) {
  Simulator sim(TransformedSystem(diagonal_model(vec({-1, 2}), Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1),
                config(32, 1.0));
  GridState s = sim.make_state(sim.sample([](double x) { return vec({std::sin(3 * x), std::cos(2 * x)}); }));
  const BoundaryTraces tr = sim.apply_boundary(s);
  EXPECT_EQ(max_norm(tr.xi_in_left), 0.0);
  EXPECT_EQ(max_norm(tr.xi_in_right), 0.0);
  EXPECT_EQ(tr.residual, 0.0);
}

TEST(ApplyBoundary, EquilibriumGivesZeroGhosts) {
  Simulator sim = sve_simulator(3.0, -3.1, config(32, 1.0));
  GridState s = sim.make_state(Matrix::Zero(32, 3));
  const BoundaryTraces tr = sim.apply_boundary(s);
  EXPECT_EQ(max_norm(s.ghost_left), 0.0);
  EXPECT_EQ(max_norm(s.ghost_right), 0.0);
  EXPECT_EQ(max_norm(tr.V_left), 0.0);
  EXPECT_EQ(max_norm(tr.V_right), 0.0);
}

TEST(ApplyBoundary, SvePhysicalRelations) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-1e-3, 1e-3);
  for (auto [k1, k2] : {std::pair{3.0, -3.1}, std::pair{1.0, 1.0}, std::pair{-0.5, -2.9}}) {
    Simulator sim = sve_simulator(k1, k2, config(40, 1.0));
    Matrix v0(40, 3);
    for (Index i = 0; i < 40; ++i)
      for (Index j = 0; j < 3; ++j) v0(i, j) = d(rng);
    GridState s = sim.make_state(v0);
    const BoundaryTraces tr = sim.apply_boundary(s);
    EXPECT_EQ(tr.residual, 0.0);
    const Vector u0 = sim.system().P_inv() * tr.V_left;
    const Vector u1 = sim.system().P_inv() * tr.V_right;
    EXPECT_LE(sve::physical_boundary_residual(u0, u1, k1, k2), 1e-10);
    EXPECT_GT(sve::physical_boundary_residual(u0, u1, k1 + 1.0, k2), 1e-8);
  }
}

TEST(ApplyBoundary, GhostsExtrapolateLinearlyInCharacteristicVariables) {
  Simulator sim(TransformedSystem(diagonal_model(vec({-1, 2}), Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1),
                config(20, 1.0));
  // outgoing fields linear in x are reproduced exactly by the ghosts
  GridState s = sim.make_state(sim.sample([](double x) { return vec({0.3 - x, 0.1 + 2 * x}); }));
  const double dx = s.dx;
  EXPECT_NEAR(s.ghost_left(0, 0), 0.3 + 0.5 * dx, 1e-15);
  EXPECT_NEAR(s.ghost_left(1, 0), 0.3 + 1.5 * dx, 1e-15);
  EXPECT_NEAR(s.ghost_right(0, 1), 0.1 + 2 * (1 + 0.5 * dx), 1e-14);
  EXPECT_NEAR(s.ghost_right(1, 1), 0.1 + 2 * (1 + 1.5 * dx), 1e-14);
}

TEST(Rhs, EquilibriumIsStationary) {
  Simulator sim = sve_simulator(3.0, -3.1, config(32, 1.0));
  GridState s = sim.make_state(Matrix::Zero(32, 3));
  EXPECT_EQ(max_norm(sim.rhs(s)), 0.0);
}

TEST(Rhs, FrozenAdvectionConvergesToAnalyticDerivative) {
  const Vector speeds = vec({-1.0, 2.0});
  double prev = 0.0;
  for (Index N : {50, 100, 200}) {
    Simulator sim(TransformedSystem(diagonal_model(speeds, Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1),
                  config(N, 1.0));
    GridState s = sim.make_state(sim.sample([](double x) { return vec({std::sin(2 * kPi * x), std::sin(2 * kPi * x)}); }));
    const Matrix r = sim.rhs(s);
    double err = 0.0;
    for (Index i = 4; i < N - 4; ++i) {
      const double dv = 2 * kPi * std::cos(2 * kPi * s.x(i));
      err = std::max(err, std::abs(r(i, 0) - (-speeds(0) * dv)));
      err = std::max(err, std::abs(r(i, 1) - (-speeds(1) * dv)));
    }
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 2.5) << N;
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Rhs, FirstOrderUpwindConverges) {
  const Vector speeds = vec({-1.0, 2.0});
  double prev = 0.0;
  for (Index N : {100, 200}) {
    SimConfig c = config(N, 1.0);
    c.reconstruction_order = 1;
    Simulator sim(TransformedSystem(diagonal_model(speeds, Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1), c);
    GridState s = sim.make_state(sim.sample([](double x) { return vec({std::sin(2 * kPi * x), std::sin(2 * kPi * x)}); }));
    const Matrix r = sim.rhs(s);
    double err = 0.0;
    for (Index i = 2; i < N - 2; ++i) {
      const double dv = 2 * kPi * std::cos(2 * kPi * s.x(i));
      err = std::max(err, std::abs(r(i, 1) + speeds(1) * dv));
    }
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 1.0, 0.1);
    prev = err;
  }
}

TEST(Rhs, NearlyPureRelaxation) {
  // speeds 1e-8 stand in for A = 0, which has no characteristic decomposition
  Matrix j = Matrix::Zero(2, 2);
  j(1, 1) = -1.0;
  Simulator sim(TransformedSystem(diagonal_model(vec({-1e-8, 1e-8}), j)), FeedbackGain::zero(2, 1), config(32, 1.0));
  GridState s = sim.make_state(sim.sample([](double x) { return vec({1.0 + x, 2.0 - x}); }));
  const Matrix r = sim.rhs(s);
  for (Index i = 0; i < 32; ++i) {
    EXPECT_NEAR(r(i, 0), 0.0, 1e-6);
    EXPECT_NEAR(r(i, 1), -s.V(i, 1), 1e-6);
  }
}

TEST(CflDt, Examples) {
  Simulator sim(TransformedSystem(diagonal_model(vec({-1, 2}), Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1),
                config(100, 1.0));
  GridState s = sim.make_state(Matrix::Zero(100, 2));
  EXPECT_NEAR(sim.cfl_dt(s, 0.5), 0.0025, 1e-17);

  Simulator sve = sve_simulator(3.0, -3.1, config(200, 1.0));
  GridState z = sve.make_state(Matrix::Zero(200, 3));
  EXPECT_NEAR(sve.cfl_dt(z, 0.5), 0.5 * 0.005 / 4.138024301558561, 1e-15);
}

TEST(CflDt, VanishingSpeedsAreRejected) {
  AffineModelSpec spec;
  spec.n = 2;
  spec.r = 1;
  spec.A_const = Matrix::Zero(2, 2);
  spec.J = Matrix::Identity(2, 2);
  spec.A0 = Matrix::Identity(2, 2);
  EXPECT_THROW(make_affine_model(spec), Error);
}

TEST(Step, EquilibriumAndZeroStep) {
  Simulator sim = sve_simulator(3.0, -3.1, config(32, 1.0));
  GridState z = sim.make_state(Matrix::Zero(32, 3));
  GridState next = sim.step(z, sim.cfl_dt(z, 0.5));
  EXPECT_EQ(max_norm(next.V), 0.0);
  GridState s = sim.make_state(sim.sample([](double x) { return vec({1e-3 * bump(x, 0.5, 0.5), 0.0, 0.0}); }));
  GridState same = sim.step(s, 0.0);
  EXPECT_TRUE(same.V == s.V);
  EXPECT_EQ(same.t, s.t);
}

TEST(Step, BlowUpIsReported) {
  SimConfig c = config(32, 1.0);
  c.blowup_factor = 1.5;
  Simulator sim(TransformedSystem(diagonal_model(vec({-1, 2}), Matrix::Zero(2, 2))),
                FeedbackGain::diagonal(2, 1, 3.0, 3.0), c);
  GridState s = sim.make_state(Matrix::Constant(32, 2, 1.0));
  try {
    for (int k = 0; k < 1000; ++k) s = sim.step(s, sim.cfl_dt(s, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BlowUp);
  }
}

TEST(Step, LinearExactSolutionSecondOrder) {
  const Vector speeds = vec({-1.0, 2.0});
  auto error_at = [&](Index N) {
    Simulator sim(TransformedSystem(diagonal_model(speeds, Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1),
                  config(N, 0.1));
    const Trajectory tr = sim.run(sim.sample([](double x) { return vec({bump(x, 0.5, 0.6), bump(x, 0.5, 0.6)}); }));
    const Matrix exact = sim.sample([](double x) { return vec({bump(x + 0.1, 0.5, 0.6), bump(x - 0.2, 0.5, 0.6)}); });
    return max_norm(Matrix(tr.samples.back().state.V - exact));
  };
  const double e1 = error_at(100);
  const double e2 = error_at(200);
  EXPECT_GT(std::log2(e1 / e2), 2.0);
  EXPECT_LE(e2, 1e-4);
}

TEST(TimeDerivatives, EquilibriumIsZero) {
  Simulator sim = sve_simulator(3.0, -3.1, config(32, 1.0));
  GridState z = sim.make_state(Matrix::Zero(32, 3));
  for (DerivativeScheme scheme : {DerivativeScheme::SemiDiscrete, DerivativeScheme::Central2}) {
    const TimeDerivatives d = sim.time_derivatives(z, scheme);
    EXPECT_EQ(max_norm(d.V_t), 0.0);
    EXPECT_EQ(max_norm(d.V_tt), 0.0);
  }
}

TEST(TimeDerivatives, FrozenLinearSine) {
  const Vector speeds = vec({-1.0, 2.0});
  Simulator sim(TransformedSystem(diagonal_model(speeds, Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1),
                config(200, 1.0));
  GridState s = sim.make_state(sim.sample([](double x) { return vec({std::sin(2 * kPi * x), std::cos(2 * kPi * x)}); }));
  for (DerivativeScheme scheme : {DerivativeScheme::SemiDiscrete, DerivativeScheme::Central2}) {
    const TimeDerivatives d = sim.time_derivatives(s, scheme);
    const double w = 2 * kPi;
    // leading central-difference term |lambda| w^3 dx^2 / 6
    const double tol = scheme == DerivativeScheme::Central2 ? 1.05 * 2.0 * w * w * w * s.dx * s.dx / 6.0 : 2e-4;
    for (Index i = 5; i < 195; ++i) {
      const double x = s.x(i);
      EXPECT_NEAR(d.V_t(i, 0), speeds(0) * -w * std::cos(w * x), tol);
      EXPECT_NEAR(d.V_t(i, 1), speeds(1) * w * std::sin(w * x), tol);
      EXPECT_NEAR(d.V_tt(i, 0), -speeds(0) * speeds(0) * w * w * std::sin(w * x), 5e-2);
      EXPECT_NEAR(d.V_tt(i, 1), -speeds(1) * speeds(1) * w * w * std::cos(w * x), 5e-2);
    }
  }
}

TEST(TimeDerivatives, RelaxationOdeCase) {
  Matrix j = Matrix::Zero(2, 2);
  j(1, 1) = -2.0;
  j(0, 1) = 0.5;
  Simulator sim(TransformedSystem(diagonal_model(vec({-1e-8, 1e-8}), j)), FeedbackGain::zero(2, 1), config(32, 1.0));
  GridState s = sim.make_state(Matrix::Constant(32, 2, 1.0));
  const TimeDerivatives d = sim.time_derivatives(s, DerivativeScheme::Central2);
  for (Index i = 0; i < 32; ++i) {
    const Vector v = s.V.row(i).transpose();
    EXPECT_LE(max_norm(Vector(d.V_t.row(i).transpose() - j * v)), 1e-12);
    EXPECT_LE(max_norm(Vector(d.V_tt.row(i).transpose() - j * j * v)), 1e-12);
  }
}

TEST(Run, EquilibriumStaysAtZero) {
  SimConfig c = config(64, 0.5);
  c.output_stride = 5;
  Simulator sim = sve_simulator(3.0, -3.1, c);
  const Trajectory tr = sim.run(Matrix::Zero(64, 3));
  EXPECT_EQ(tr.termination, Termination::Completed);
  EXPECT_GT(tr.samples.size(), 2u);
  for (const Snapshot& s : tr.samples) EXPECT_EQ(max_norm(s.state.V), 0.0);
  EXPECT_EQ(tr.max_abs_V, 0.0);
  EXPECT_TRUE(tr.warnings.empty());
  EXPECT_DOUBLE_EQ(tr.samples.back().state.t, 0.5);
}

TEST(Run, AllCharacteristicsLeaveWithoutFeedback) {
  const Vector speeds = vec({-1.0, 2.0});
  SimConfig c = config(400, 1.05);
  Simulator sim(TransformedSystem(diagonal_model(speeds, Matrix::Zero(2, 2))), FeedbackGain::zero(2, 1), c);
  const Trajectory tr = sim.run(sim.sample([](double x) { return vec({bump(x, 0.5, 0.5), bump(x, 0.5, 0.5)}); }));
  ASSERT_EQ(tr.termination, Termination::Completed);
  EXPECT_LE(max_norm(tr.samples.back().state.V), 1e-6);
}

TEST(Run, IncompatibleDataWarns) {
  Simulator sim = sve_simulator(3.0, -3.1, config(32, 0.01));
  const Trajectory tr = sim.run(Matrix::Constant(32, 3, 1e-3));
  EXPECT_FALSE(tr.warnings.empty());
  EXPECT_EQ(tr.termination, Termination::Completed);
}

TEST(Run, DestabilizingGainBlowsUp) {
  SimConfig c = config(32, 200.0);
  Simulator sim(TransformedSystem(diagonal_model(vec({-1, 2}), Matrix::Zero(2, 2))),
                FeedbackGain::diagonal(2, 1, 3.0, 3.0), c);
  const Trajectory tr = sim.run(sim.sample([](double x) { return vec({1e-3 * bump(x, 0.5, 0.5), 0.0}); }));
  EXPECT_EQ(tr.termination, Termination::BlowUp);
  EXPECT_FALSE(tr.message.empty());
  EXPECT_LT(tr.samples.back().state.t, 200.0);
}

TEST(Run, BoundaryLawHoldsExactlyAndIsDeterministic) {
  SimConfig c = config(64, 0.5);
  c.output_stride = 10;
  Simulator sim = sve_simulator(3.0, -3.1, c);
  const Matrix v0 = sim.sample([&](double x) {
    const double b = 1e-3 * bump(x, 0.5, 0.5);
    return Vector(sim.system().P() * vec({b, b, b}));
  });
  const Trajectory a = sim.run(v0);
  const Trajectory b = sim.run(v0);
  EXPECT_EQ(a.max_boundary_residual, 0.0);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    EXPECT_TRUE(a.samples[k].state.V == b.samples[k].state.V);
    const auto& tr = a.samples[k].traces;
    const Vector u0 = sim.system().P_inv() * tr.V_left;
    const Vector u1 = sim.system().P_inv() * tr.V_right;
    EXPECT_LE(sve::physical_boundary_residual(u0, u1, 3.0, -3.1), 1e-10);
  }
}

TEST(Run, RejectsMismatchedInput) {
  Simulator sim = sve_simulator(3.0, -3.1, config(32, 0.1));
  EXPECT_THROW(sim.run(Matrix::Zero(31, 3)), Error);
  EXPECT_THROW(Simulator(TransformedSystem(sve::as_system_model(sve::reference_parameters())),
                         FeedbackGain::zero(2, 1), config(32, 0.1)),
               Error);
}
