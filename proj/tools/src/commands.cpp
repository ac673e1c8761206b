#include "commands.hpp"

#include "pdstab/export.hpp"
#include "pdstab/lyapunov.hpp"
#include "pdstab/structure.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <ostream>
#include <thread>

namespace pdstab::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMonotoneTol = 1e-8;

std::ofstream open_out(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  std::ofstream f(g.out_dir / name);
  if (!f) throw UsageError("cannot write " + (g.out_dir / name).string());
  return f;
}

void write_json_file(const Globals& g, const std::string& name, const json& j) {
  std::ofstream f = open_out(g, name);
  f << j.dump(2) << '\n';
}

void emit(const Globals& g, Streams io, const json& report, const std::string& text) {
  if (g.json_stdout) {
    io.out << report.dump(2) << '\n';
  } else if (!g.quiet) {
    io.out << text;
  }
}

std::string fmt(double v) { return io::format_double(v); }

std::string join(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

const char* pass_word(bool ok) { return ok ? "pass" : "FAIL"; }

BoundaryWeights weights_for(const SystemModel& model, const Spectrum& s0) {
  return compute_boundary_weights(s0, model.A0(Vector::Zero(model.n)));
}

json admissibility_json(const sve::AdmissibilityReport& r) {
  json j;
  j["lhs"] = json::array();
  j["pass"] = json::array();
  for (double v : r.lhs) j["lhs"].push_back(number(v));
  for (bool b : r.pass) j["pass"].push_back(b);
  j["passed"] = r.passed;
  return j;
}

json gain_json(const GainReport& r) {
  json j;
  j["passed"] = r.passed();
  j["pd1"] = r.pd1;
  j["pd2"] = r.pd2;
  j["margin1"] = number(r.margin1);
  j["margin2"] = number(r.margin2);
  j["commutation_residual"] = number(r.commutation_residual);
  j["M1"] = to_json(r.M1);
  j["M2"] = to_json(r.M2);
  return j;
}

struct SimOutcome {
  Trajectory trajectory;
  std::optional<LyapunovTrace> trace;
  std::string trace_error;
  std::string fit_error;
  AlphaChoice alpha;
};

SimOutcome run_simulation(const RunConfig& config, const SystemModel& model, const FeedbackGain& gain,
                          const SimConfig& sim_config, std::pair<double, double> window,
                          const std::optional<AlphaChoice>& alpha_in) {
  TransformedSystem sys(model);
  SimOutcome out;
  if (alpha_in) {
    out.alpha = *alpha_in;
  } else if (config.alpha) {
    out.alpha.alpha = *config.alpha;
  } else {
    out.alpha = default_alpha(sys);
  }
  const Simulator sim(sys, gain, sim_config);
  const Matrix v0 = build_initial(config, sim);
  out.trajectory = sim.run(v0);
  try {
    out.trace = build_trace(sim, out.trajectory, out.alpha.alpha);
  } catch (const Error& e) {
    out.trace_error = e.what();
    return out;
  }
  try {
    out.trace->fit = fit_decay_rate(*out.trace, window);
  } catch (const Error& e) {
    out.fit_error = e.what();
  }
  return out;
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Completed:
      return "completed";
    case Termination::BlowUp:
      return "blow-up";
    case Termination::SpectralFailure:
      return "spectral-failure";
  }
  return "unknown";
}

// Maximal sub-intervals of [lo, hi] where pred holds, endpoints refined by bisection.
std::vector<std::pair<double, double>> pass_intervals(const std::function<bool(double)>& pred, double lo, double hi,
                                                      int cells) {
  auto safe = [&](double x) {
    try {
      return pred(x);
    } catch (const Error&) {
      return false;
    }
  };
  auto refine = [&](double a, double b) {
    const bool fa = safe(a);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      (safe(mid) == fa ? a : b) = mid;
    }
    return fa ? a : b;
  };
  std::vector<std::pair<double, double>> out;
  const double h = (hi - lo) / cells;
  double start = kNaN;
  bool prev = safe(lo);
  if (prev) start = lo;
  for (int i = 1; i <= cells; ++i) {
    const double x = i == cells ? hi : lo + h * i;
    const bool cur = safe(x);
    if (cur && !prev) start = refine(x - h, x);
    if (!cur && prev) out.emplace_back(start, refine(x - h, x));
    prev = cur;
  }
  if (prev) out.emplace_back(start, hi);
  return out;
}

json intervals_json(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [lo, hi] : v) a.push_back(json::array({lo, hi}));
  return a;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BlowUp:
    case ErrorCode::SpectralFailure:
      return kBlowUp;
    case ErrorCode::InvalidConfig:
      return kUsage;
    default:
      return kModelError;
  }
}

int guarded(const std::function<int()>& fn, Streams io) {
  try {
    return fn();
  } catch (const UsageError& e) {
    io.err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    io.err << "file error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    io.err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
}

int cmd_check_structure(const RunConfig& config, const Globals& g, Streams io) {
  const SystemModel model = build_model(config);
  const StructureReport r = check_partial_dissipativity(model, config.structure_tol);
  const NeighborhoodDiagnostic nb =
      sample_symmetrizer(model, config.neighborhood_radius, config.neighborhood_samples, config.seed);

  json j;
  j["command"] = "check-structure";
  j["model"] = model.name;
  j["n"] = model.n;
  j["m"] = r.m;
  j["r"] = model.r;
  j["passed"] = r.passed();
  j["lambda"] = to_json(r.lambda);
  j["symmetrizer"] = {{"residual", number(r.symmetrizer_residual)},
                      {"pass", r.symmetrizer_pass},
                      {"a0_margin", number(r.a0_margin)}};
  j["partial_dissipativity"] = {{"residual", number(r.pdq_residual)},
                                {"pass", r.pdq_pass},
                                {"transformed_source_jacobian", to_json(r.transformed_source_jacobian)}};
  j["dissipativity"] = {{"margin", number(r.dissipativity_margin)},
                        {"block_slack", number(r.dissipative_block_slack)},
                        {"pass", r.dissipativity_pass},
                        {"transformed_dissipation", to_json(r.transformed_dissipation)}};
  j["boundary_weights"] = {{"X1", to_json(r.X1)},
                           {"X2", to_json(r.X2)},
                           {"X1_margin", number(r.X1_margin)},
                           {"X2_margin", number(r.X2_margin)},
                           {"offdiag_residual", number(r.block_offdiag_residual)}};
  j["generalized"] = {{"S11_norm", number(r.generalized_S11_norm)}, {"S21_norm", number(r.generalized_S21_norm)}};
  j["neighborhood"] = {{"radius", config.neighborhood_radius},
                       {"samples", nb.samples},
                       {"seed", config.seed},
                       {"max_symmetrizer_residual", number(nb.max_symmetrizer_residual)},
                       {"max_relative_residual", number(nb.max_relative_residual)},
                       {"min_a0_margin", number(nb.min_a0_margin)}};
  write_json_file(g, "structure.json", j);

  std::ostringstream t;
  t << "model " << model.name << " (n=" << model.n << ", m=" << r.m << ", r=" << model.r << ")\n"
    << "  speeds            " << join(r.lambda) << '\n'
    << "  symmetrizer       " << pass_word(r.symmetrizer_pass) << "  residual " << fmt(r.symmetrizer_residual)
    << ", A0 margin " << fmt(r.a0_margin) << '\n'
    << "  P Q_U P^-1 form   " << pass_word(r.pdq_pass) << "  residual " << fmt(r.pdq_residual) << '\n'
    << "  dissipativity     " << pass_word(r.dissipativity_pass) << "  margin " << fmt(r.dissipativity_margin)
    << ", block slack " << fmt(r.dissipative_block_slack) << '\n'
    << (r.passed() ? "structure: pass\n" : "structure: FAIL\n");
  emit(g, io, j, t.str());
  return r.passed() ? kPass : kConditionFail;
}

int cmd_check_gains(const RunConfig& config, const Globals& g, Streams io) {
  const SystemModel model = build_model(config);
  const Spectrum s0 = reference_spectrum(model);
  const FeedbackGain gain = build_gain(config, model);
  const BoundaryWeights w = weights_for(model, s0);
  const GainReport r = check_gain(s0, w.X1, w.X2, gain, config.gain_tol);

  bool passed = r.passed();
  json j;
  j["command"] = "check-gains";
  j["model"] = model.name;
  j["K"] = to_json(gain.matrix());
  j["general"] = gain_json(r);
  std::ostringstream t;
  t << "condition 1 (boundary, A0 weights)   " << pass_word(r.pd1) << "  margin " << fmt(r.margin1) << '\n'
    << "condition 2 (boundary, exp weights)  " << pass_word(r.pd2) << "  margin " << fmt(r.margin2) << '\n';
  if (config.k1) {
    const auto ex = sve::gain_admissible(*config.k1, *config.k2, config.sve_params, sve::AdmissibilityMode::Exact);
    const auto su =
        sve::gain_admissible(*config.k1, *config.k2, config.sve_params, sve::AdmissibilityMode::Sufficient);
    j["sve"] = {{"k1", *config.k1}, {"k2", *config.k2}, {"exact", admissibility_json(ex)},
                {"sufficient", admissibility_json(su)}};
    passed = passed && ex.passed;
    t << "SVE exact conditions                 " << pass_word(ex.passed) << "  lhs ";
    for (std::size_t k = 0; k < ex.lhs.size(); ++k) t << (k ? ", " : "") << fmt(ex.lhs[k]);
    t << "\nSVE sufficient conditions            " << pass_word(su.passed) << "  lhs ";
    for (std::size_t k = 0; k < su.lhs.size(); ++k) t << (k ? ", " : "") << fmt(su.lhs[k]);
    t << '\n';
  }
  j["passed"] = passed;
  t << (passed ? "gains: pass\n" : "gains: FAIL\n");
  write_json_file(g, "gains.json", j);
  emit(g, io, j, t.str());
  return passed ? kPass : kConditionFail;
}

int cmd_simulate(const RunConfig& config, const Globals& g, Streams io) {
  const SystemModel model = build_model(config);
  const FeedbackGain gain = build_gain(config, model);
  const auto window = fit_window(config);
  const SimOutcome o = run_simulation(config, model, gain, config.sim, window, std::nullopt);
  const Trajectory& traj = o.trajectory;
  const TransformedSystem sys(model);

  {
    std::ofstream f = open_out(g, "trajectory.csv");
    io::write_trajectory_csv(f, sys, traj);
  }
  {
    std::ofstream f = open_out(g, "boundary.csv");
    io::write_boundary_csv(f, traj);
  }
  LyapunovTrace trace;
  trace.alpha = o.alpha.alpha;
  if (o.trace) trace = *o.trace;
  {
    std::ofstream f = open_out(g, "lyapunov.csv");
    io::write_lyapunov_csv(f, trace);
  }
  {
    std::ofstream f = open_out(g, "decay.dat");
    io::write_decay_dat(f, trace);
  }
  {
    std::ofstream f = open_out(g, "decay.gp");
    f << io::decay_plot_script("decay.dat", "decay.png", trace);
  }
  json fit;
  fit["nu_hat"] = trace.fit ? number(trace.fit->nu_hat) : json(nullptr);
  fit["window"] = json::array({window.first, window.second});
  fit["residual"] = trace.fit ? number(trace.fit->residual) : json(nullptr);
  fit["alpha"] = number(o.alpha.alpha);
  write_json_file(g, "fit.json", fit);

  double physical = 0.0;
  if (config.is_sve() && config.k1) {
    for (const Snapshot& s : traj.samples) {
      const Vector ul = sys.P_inv() * s.traces.V_left;
      const Vector ur = sys.P_inv() * s.traces.V_right;
      physical = std::max(physical, sve::physical_boundary_residual(ul, ur, *config.k1, *config.k2));
    }
  }
  const double increase = trace.samples.size() > 2 ? max_relative_increase(trace, 1) : kNaN;

  json j;
  j["command"] = "simulate";
  j["model"] = model.name;
  j["termination"] = termination_name(traj.termination);
  j["message"] = traj.message;
  j["steps"] = traj.steps;
  j["t_final"] = traj.samples.empty() ? json(nullptr) : json(traj.samples.back().state.t);
  j["N"] = config.sim.N;
  j["cfl"] = config.sim.cfl;
  j["alpha"] = number(o.alpha.alpha);
  j["alpha_star"] = config.alpha ? json(nullptr) : number(o.alpha.alpha_star);
  j["samples"] = traj.samples.size();
  j["max_boundary_residual"] = number(traj.max_boundary_residual);
  j["max_physical_boundary_residual"] = config.k1 ? number(physical) : json(nullptr);
  j["max_abs_V"] = number(traj.max_abs_V);
  j["max_relative_increase"] = number(increase);
  j["monotone"] = std::isfinite(increase) ? json(increase <= kMonotoneTol) : json(nullptr);
  j["fit"] = fit;
  j["fit_error"] = o.fit_error;
  j["lyapunov_error"] = o.trace_error;
  j["warnings"] = traj.warnings;
  write_json_file(g, "simulate.json", j);

  if (!g.quiet) {
    for (const std::string& w : traj.warnings) io.err << "warning: " << w << '\n';
  }
  std::ostringstream t;
  t << "termination " << termination_name(traj.termination) << " after " << traj.steps << " steps";
  if (!traj.samples.empty()) t << ", t = " << fmt(traj.samples.back().state.t);
  t << '\n';
  if (!traj.message.empty()) t << "  " << traj.message << '\n';
  t << "alpha " << fmt(o.alpha.alpha) << '\n';
  if (trace.fit) {
    t << "nu_hat " << fmt(trace.fit->nu_hat) << " on [" << fmt(window.first) << ", " << fmt(window.second)
      << "], residual " << fmt(trace.fit->residual) << '\n';
  } else {
    t << "no decay fit: " << (o.fit_error.empty() ? o.trace_error : o.fit_error) << '\n';
  }
  if (std::isfinite(increase)) t << "max relative increase of L " << fmt(increase) << '\n';
  t << "outputs in " << g.out_dir.string() << '\n';
  emit(g, io, j, t.str());
  return traj.termination == Termination::Completed ? kPass : kBlowUp;
}

int cmd_sweep(const RunConfig& config, const Globals& g, Streams io) {
  if (!config.sweep) throw UsageError("sweep: the config needs a 'sweep' section");
  const SweepSpec& sw = *config.sweep;
  if (sw.kind == "k" && !config.is_sve()) throw UsageError("sweep over (k1, k2) needs the SVE model");
  const std::vector<double> a = sw.first.values();
  const std::vector<double> b = sw.second.values();
  if (a.empty() || b.empty()) throw UsageError("sweep: empty grid");

  const SystemModel model = build_model(config);
  const Spectrum s0 = reference_spectrum(model);
  const BoundaryWeights w = weights_for(model, s0);
  SimConfig sim = config.sim;
  if (sw.N) sim.N = *sw.N;
  if (sw.t_end) sim.t_end = *sw.t_end;
  try {
    sim.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  RunConfig run_config = config;
  run_config.sim = sim;
  const auto window = config.fit_window ? *config.fit_window : std::make_pair(0.25 * sim.t_end, sim.t_end);
  std::optional<AlphaChoice> alpha;
  if (sw.simulate) {
    if (config.alpha) {
      alpha = AlphaChoice{*config.alpha, 0.0, 0.0, 0};
    } else {
      alpha = default_alpha(TransformedSystem(model));
    }
  }
  const auto [kp_bound, km_bound] = diagonal_gain_bounds(s0);

  struct Row {
    double a = 0.0, b = 0.0;
    bool sufficient = false, exact = false;
    double nu = kNaN;
    std::string note;
  };
  const std::size_t total = a.size() * b.size();
  std::vector<Row> rows(total);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      Row& row = rows[idx];
      row.a = a[idx / b.size()];
      row.b = b[idx % b.size()];
      try {
        std::optional<FeedbackGain> gain;
        if (sw.kind == "k") {
          row.sufficient = sve::admissible_sufficient(row.a, row.b, config.sve_params);
          row.exact = sve::admissible_exact(row.a, row.b, config.sve_params);
          gain = sve::feedback_matrix(row.a, row.b, config.sve_params);
        } else {
          gain = FeedbackGain::diagonal(model.n, s0.m, row.a, row.b);
          row.sufficient = row.a * row.a < kp_bound && row.b * row.b < km_bound;
          row.exact = check_gain(s0, w.X1, w.X2, *gain, config.gain_tol).passed();
        }
        if (sw.simulate && row.exact) {
          const SimOutcome o = run_simulation(run_config, model, *gain, sim, window, alpha);
          if (o.trajectory.termination == Termination::Completed && o.trace && o.trace->fit) {
            row.nu = o.trace->fit->nu_hat;
          }
        }
      } catch (const Error& e) {
        row.note = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(sw.workers, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();

  const std::string ca = sw.kind == "k" ? "k1" : "kappa_plus";
  const std::string cb = sw.kind == "k" ? "k2" : "kappa_minus";
  {
    std::ofstream f = open_out(g, "sweep.csv");
    f << ca << ',' << cb << ",admissible_sufficient,admissible_exact,nu_hat\n";
    for (const Row& r : rows) {
      f << io::format_double(r.a) << ',' << io::format_double(r.b) << ',' << (r.sufficient ? 1 : 0) << ','
        << (r.exact ? 1 : 0) << ',' << io::format_double(r.nu) << '\n';
    }
  }
  std::size_t n_suff = 0, n_exact = 0, n_decay = 0, n_err = 0;
  for (const Row& r : rows) {
    n_suff += r.sufficient;
    n_exact += r.exact;
    n_decay += std::isfinite(r.nu) && r.nu > 0.0;
    n_err += !r.note.empty();
  }
  json j;
  j["command"] = "sweep";
  j["model"] = model.name;
  j["kind"] = sw.kind;
  j["grid"] = {{ca, json::array({sw.first.lo, sw.first.hi, sw.first.count})},
               {cb, json::array({sw.second.lo, sw.second.hi, sw.second.count})}};
  j["points"] = total;
  j["admissible_sufficient"] = n_suff;
  j["admissible_exact"] = n_exact;
  j["decaying"] = n_decay;
  j["errors"] = n_err;
  j["simulated"] = sw.simulate;
  j["N"] = sim.N;
  j["t_end"] = sim.t_end;
  write_json_file(g, "sweep.json", j);

  std::ostringstream t;
  t << "sweep " << total << " points: " << n_suff << " sufficient, " << n_exact << " exact";
  if (sw.simulate) t << ", " << n_decay << " with nu_hat > 0";
  t << "\noutputs in " << g.out_dir.string() << '\n';
  emit(g, io, j, t.str());
  return kPass;
}

int cmd_sve_design(const RunConfig& config, const Globals& g, Streams io) {
  if (!config.is_sve()) throw UsageError("sve-design needs the SVE model");
  const sve::SveParameters& p = config.sve_params;
  const sve::SveSpectralData d = sve::spectral_data(p);
  const sve::StructuralMatrices sm = sve::structural_matrices(p);
  const sve::VietaResiduals vr = sve::vieta_residuals(d.lambda, p);
  const auto [kp, km] = diagonal_gain_bounds(sve::spectrum(p));

  auto cond = [&](bool first_gain, sve::AdmissibilityMode mode) {
    return [&p, first_gain, mode](double k) {
      const auto r = first_gain ? sve::gain_admissible(k, 0.0, p, mode) : sve::gain_admissible(0.0, k, p, mode);
      if (mode == sve::AdmissibilityMode::Sufficient) return first_gain ? r.pass[0] : r.pass[1];
      return first_gain ? r.pass[0] && r.pass[2] : r.pass[1] && r.pass[3];
    };
  };
  constexpr double kScanLo = -20.0;
  constexpr double kScanHi = 20.0;
  constexpr int kScanCells = 4000;

  json j;
  j["command"] = "sve-design";
  j["parameters"] = {{"g", p.g},     {"a", p.a},         {"H_star", p.H_star}, {"V_star", p.V_star},
                     {"C_f", p.C_f}, {"S_b", p.S_b},     {"B_star", p.B_star}};
  j["lambda"] = json::array({d.lambda[0], d.lambda[1], d.lambda[2]});
  j["vieta_residuals"] = {{"product", vr.product}, {"sum", vr.sum}, {"pairwise", vr.pairwise}};
  j["X"] = json::array({d.X[0], d.X[1], d.X[2]});
  j["beta"] = json::array({d.beta2, d.beta3});
  j["eta"] = json::array({d.eta2, d.eta3});
  j["det_A0"] = {{"cofactor", sm.det_cofactor}, {"product", sm.det_product}};
  j["diagonal_gain_bounds"] = {{"kappa_plus_sq", kp}, {"kappa_minus_sq", km}};
  j["k_scan"] = json::array({kScanLo, kScanHi, kScanCells});
  j["k1_intervals"] = {
      {"sufficient", intervals_json(pass_intervals(cond(true, sve::AdmissibilityMode::Sufficient), kScanLo, kScanHi, kScanCells))},
      {"exact", intervals_json(pass_intervals(cond(true, sve::AdmissibilityMode::Exact), kScanLo, kScanHi, kScanCells))}};
  j["k2_intervals"] = {
      {"sufficient", intervals_json(pass_intervals(cond(false, sve::AdmissibilityMode::Sufficient), kScanLo, kScanHi, kScanCells))},
      {"exact", intervals_json(pass_intervals(cond(false, sve::AdmissibilityMode::Exact), kScanLo, kScanHi, kScanCells))}};

  std::ostringstream t;
  t << std::setprecision(10);
  t << "lambda             " << fmt(d.lambda[0]) << ", " << fmt(d.lambda[1]) << ", " << fmt(d.lambda[2]) << '\n'
    << "X11, X22, X33      " << fmt(d.X[0]) << ", " << fmt(d.X[1]) << ", " << fmt(d.X[2]) << '\n'
    << "beta2, beta3       " << fmt(d.beta2) << ", " << fmt(d.beta3) << '\n'
    << "eta2, eta3         " << fmt(d.eta2) << ", " << fmt(d.eta3) << '\n'
    << "det A0(0)          " << fmt(sm.det_cofactor) << " (product form " << fmt(sm.det_product) << ")\n"
    << "diagonal gains     kappa_+^2 < " << fmt(kp) << ", kappa_-^2 < " << fmt(km) << '\n';
  for (const char* key : {"k1_intervals", "k2_intervals"}) {
    t << std::string(key).substr(0, 2) << " sufficient      ";
    for (const auto& iv : j[key]["sufficient"]) t << '[' << fmt(iv[0].get<double>()) << ", " << fmt(iv[1].get<double>()) << "] ";
    t << '\n';
  }

  int code = kPass;
  if (config.k1) {
    const double k1 = *config.k1;
    const double k2 = *config.k2;
    const auto ex = sve::gain_admissible(k1, k2, p, sve::AdmissibilityMode::Exact);
    const auto su = sve::gain_admissible(k1, k2, p, sve::AdmissibilityMode::Sufficient);
    j["gains"] = {{"k1", k1},
                  {"k2", k2},
                  {"pi2", sve::pi(2, k1, p)},
                  {"pi3", sve::pi(3, k1, p)},
                  {"chi2", sve::chi(2, k2, p)},
                  {"chi3", sve::chi(3, k2, p)},
                  {"exact", admissibility_json(ex)},
                  {"sufficient", admissibility_json(su)}};
    t << "(k1, k2) = (" << fmt(k1) << ", " << fmt(k2) << "): exact " << pass_word(ex.passed) << ", sufficient "
      << pass_word(su.passed) << '\n';
    code = ex.passed ? kPass : kConditionFail;
  }
  write_json_file(g, "design.json", j);
  emit(g, io, j, t.str());
  return code;
}

}  // namespace pdstab::cli
