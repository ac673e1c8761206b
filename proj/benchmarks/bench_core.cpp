#include "pdstab/feedback.hpp"
#include "pdstab/lyapunov.hpp"
#include "pdstab/simulator.hpp"
#include "pdstab/structure.hpp"
#include "pdstab/sve.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace pdstab;

namespace {

Matrix random_diagonalizable(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix r(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) r(i, j) = u(rng) + (i == j ? 2.0 : 0.0);
  Vector lam(n);
  for (Index i = 0; i < n; ++i) lam(i) = (i % 2 ? 1.0 : -1.0) * (0.5 + i);
  return r * diag(lam) * r.inverse();
}

Simulator sve_simulator(Index N) {
  const auto p = sve::reference_parameters();
  SimConfig c;
  c.N = N;
  return Simulator(TransformedSystem(sve::as_system_model(p)), sve::feedback_matrix(3.0, -3.1, p), c);
}

GridState bump_state(const Simulator& sim) {
  const Matrix v0 = sim.sample([&](double x) {
    const double s = std::abs(x - 0.5) < 0.25 ? 1e-3 * std::pow(std::cos(2.0 * M_PI * (x - 0.5)), 4) : 0.0;
    Vector u(3);
    u << s, s, s;
    return Vector(sim.system().P() * u);
  });
  GridState s = sim.make_state(v0);
  sim.apply_boundary(s);
  return s;
}

}  // namespace

static void BM_SpectralDecompose(benchmark::State& state) {
  const Matrix a = random_diagonalizable(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(a));
}
BENCHMARK(BM_SpectralDecompose)->Arg(3)->Arg(6)->Arg(12);

static void BM_RefineSpectrum(benchmark::State& state) {
  const Matrix a = random_diagonalizable(state.range(0), 2);
  const Spectrum guess = spectral_decompose(a);
  const Matrix b = a + 1e-4 * random_diagonalizable(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(refine_spectrum(b, guess));
}
BENCHMARK(BM_RefineSpectrum)->Arg(3)->Arg(6)->Arg(12);

static void BM_SveRhs(benchmark::State& state) {
  const Simulator sim = sve_simulator(state.range(0));
  const GridState s = bump_state(sim);
  for (auto _ : state) benchmark::DoNotOptimize(sim.rhs(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SveRhs)->Arg(100)->Arg(200)->Arg(400);

static void BM_SveStep(benchmark::State& state) {
  const Simulator sim = sve_simulator(200);
  const GridState s = bump_state(sim);
  const double dt = sim.cfl_dt(s, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(s, dt));
}
BENCHMARK(BM_SveStep);

static void BM_CheckGain(benchmark::State& state) {
  const auto p = sve::reference_parameters();
  const Spectrum s = sve::spectrum(p);
  const BoundaryWeights w = compute_boundary_weights(s, sve::structural_matrices(p).A00);
  const FeedbackGain k = sve::feedback_matrix(3.0, -3.1, p);
  for (auto _ : state) benchmark::DoNotOptimize(check_gain(s, w.X1, w.X2, k));
}
BENCHMARK(BM_CheckGain);

static void BM_DefaultAlpha(benchmark::State& state) {
  const TransformedSystem sys(sve::as_system_model(sve::reference_parameters()));
  for (auto _ : state) benchmark::DoNotOptimize(default_alpha(sys));
}
BENCHMARK(BM_DefaultAlpha)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
