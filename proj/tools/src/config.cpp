#include "config.hpp"

#include "pdstab/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace pdstab::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& what) { throw UsageError(what); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(where + ": unknown key '" + item.key() + "'");
  }
}

double get_double(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::optional<double> opt_double(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_double(j, key, where);
}

long long get_integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
  return v.get<long long>();
}

Vector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where + ": expected an array of numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(where + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) fail(where + ": rows must have equal length");
    m.row(static_cast<Index>(i)) = parse_vector(j[i], where).transpose();
  }
  return m;
}

std::vector<Matrix> parse_matrix_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of matrices");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_matrix(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

GridAxis parse_axis(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number_integer()) {
    fail(where + ": expected [lo, hi, count]");
  }
  GridAxis a{j[0].get<double>(), j[1].get<double>(), j[2].get<int>()};
  if (a.count < 1) fail(where + ": empty grid");
  if (!(a.hi >= a.lo)) fail(where + ": hi must be >= lo");
  return a;
}

void parse_sim(const json& j, SimConfig& sim) {
  const std::string w = "sim";
  check_keys(j, {"N", "cfl", "t_end", "output_stride", "blowup_factor", "blowup_floor", "reconstruction_order", "upwind_kappa", "derivative_scheme",
                 "compatibility_tol", "max_steps"},
             w);
  if (j.contains("N")) sim.N = static_cast<Index>(get_integer(j, "N", w));
  if (auto v = opt_double(j, "cfl", w)) sim.cfl = *v;
  if (auto v = opt_double(j, "t_end", w)) sim.t_end = *v;
  if (j.contains("output_stride")) sim.output_stride = static_cast<Index>(get_integer(j, "output_stride", w));
  if (auto v = opt_double(j, "blowup_factor", w)) sim.blowup_factor = *v;
  if (auto v = opt_double(j, "blowup_floor", w)) sim.blowup_floor = *v;
  if (j.contains("reconstruction_order")) sim.reconstruction_order = static_cast<int>(get_integer(j, "reconstruction_order", w));
  if (auto v = opt_double(j, "upwind_kappa", w)) sim.upwind_kappa = *v;
  if (auto v = opt_double(j, "compatibility_tol", w)) sim.compatibility_tol = *v;
  if (j.contains("max_steps")) sim.max_steps = static_cast<Index>(get_integer(j, "max_steps", w));
  if (j.contains("derivative_scheme")) {
    const std::string s = j.at("derivative_scheme").get<std::string>();
    if (s == "semi-discrete") {
      sim.derivative_scheme = DerivativeScheme::SemiDiscrete;
    } else if (s == "central") {
      sim.derivative_scheme = DerivativeScheme::Central2;
    } else {
      fail("sim.derivative_scheme: expected 'semi-discrete' or 'central'");
    }
  }
  try {
    sim.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

void parse_initial(const json& j, InitialSpec& init) {
  const std::string w = "initial";
  check_keys(j, {"space", "components", "amplitude", "center", "width", "amplitude_cap", "allow_large"}, w);
  if (j.contains("space")) init.space = j.at("space").get<std::string>();
  if (init.space != "U" && init.space != "V" && init.space != "xi") fail("initial.space: expected U, V or xi");
  if (auto v = opt_double(j, "amplitude_cap", w)) init.amplitude_cap = *v;
  if (j.contains("allow_large")) init.allow_large = j.at("allow_large").get<bool>();
  if (j.contains("components")) {
    if (j.contains("amplitude") || j.contains("center") || j.contains("width")) {
      fail("initial: give either components or amplitude/center/width");
    }
    const json& c = j.at("components");
    if (!c.is_array()) fail("initial.components: expected an array");
    init.components.clear();
    for (const json& item : c) {
      check_keys(item, {"amplitude", "center", "width"}, "initial.components[]");
      BumpComponent b;
      if (auto v = opt_double(item, "amplitude", w)) b.amplitude = *v;
      if (auto v = opt_double(item, "center", w)) b.center = *v;
      if (auto v = opt_double(item, "width", w)) b.width = *v;
      init.components.push_back(b);
    }
  } else if (j.contains("amplitude") || j.contains("center") || j.contains("width")) {
    BumpComponent b;
    if (auto v = opt_double(j, "amplitude", w)) b.amplitude = *v;
    if (auto v = opt_double(j, "center", w)) b.center = *v;
    if (auto v = opt_double(j, "width", w)) b.width = *v;
    init.components = {b};
  }
  for (const BumpComponent& b : init.components) {
    if (!std::isfinite(b.amplitude) || !std::isfinite(b.center) || !(b.width > 0.0)) {
      fail("initial: amplitudes and centres must be finite, widths positive");
    }
    if (!init.allow_large && std::abs(b.amplitude) > init.amplitude_cap) {
      fail("initial: amplitude exceeds the small-data cap; set allow_large to override");
    }
  }
}

void parse_sweep(const json& j, std::optional<SweepSpec>& out) {
  const std::string w = "sweep";
  check_keys(j, {"k1", "k2", "kappa_plus", "kappa_minus", "workers", "simulate", "N", "t_end"}, w);
  SweepSpec s;
  const bool k = j.contains("k1") || j.contains("k2");
  const bool kappa = j.contains("kappa_plus") || j.contains("kappa_minus");
  if (k == kappa) fail("sweep: give either k1 and k2 or kappa_plus and kappa_minus");
  if (k) {
    if (!j.contains("k1") || !j.contains("k2")) fail("sweep: both k1 and k2 axes are needed");
    s.kind = "k";
    s.first = parse_axis(j.at("k1"), "sweep.k1");
    s.second = parse_axis(j.at("k2"), "sweep.k2");
  } else {
    if (!j.contains("kappa_plus") || !j.contains("kappa_minus")) fail("sweep: both kappa axes are needed");
    s.kind = "kappa";
    s.first = parse_axis(j.at("kappa_plus"), "sweep.kappa_plus");
    s.second = parse_axis(j.at("kappa_minus"), "sweep.kappa_minus");
  }
  if (j.contains("workers")) s.workers = static_cast<int>(get_integer(j, "workers", w));
  if (s.workers < 1) fail("sweep.workers must be >= 1");
  if (j.contains("simulate")) s.simulate = j.at("simulate").get<bool>();
  if (j.contains("N")) s.N = static_cast<Index>(get_integer(j, "N", w));
  if (auto v = opt_double(j, "t_end", w)) s.t_end = *v;
  out = s;
}

}  // namespace

std::vector<double> GridAxis::values() const {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) {
    v.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return v;
}

sve::SveParameters parse_sve_parameters(const json& j) {
  const std::string w = "sve";
  check_keys(j, {"g", "a", "H_star", "V_star", "C_f", "S_b", "B_star", "k1", "k2"}, w);
  for (const char* key : {"g", "a", "H_star", "V_star", "C_f"}) {
    if (!j.contains(key)) fail(std::string("sve parameters: missing ") + key);
  }
  return sve::from_values(get_double(j, "g", w), get_double(j, "a", w), get_double(j, "H_star", w),
                          get_double(j, "V_star", w), get_double(j, "C_f", w), opt_double(j, "S_b", w),
                          opt_double(j, "B_star", w).value_or(0.0));
}

AffineModelSpec parse_custom_model(const json& j) {
  const std::string w = "custom";
  check_keys(j, {"name", "n", "r", "A_const", "A_lin", "J", "H", "d", "A0", "P0", "R"}, w);
  for (const char* key : {"n", "r", "A_const", "J"}) {
    if (!j.contains(key)) fail(std::string("custom model: missing ") + key);
  }
  AffineModelSpec s;
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  s.n = static_cast<Index>(get_integer(j, "n", w));
  s.r = static_cast<Index>(get_integer(j, "r", w));
  s.A_const = parse_matrix(j.at("A_const"), "custom.A_const");
  if (j.contains("A_lin")) s.A_lin = parse_matrix_list(j.at("A_lin"), "custom.A_lin");
  s.J = parse_matrix(j.at("J"), "custom.J");
  if (j.contains("H")) s.H = parse_matrix_list(j.at("H"), "custom.H");
  if (j.contains("d")) s.d = parse_vector(j.at("d"), "custom.d");
  if (j.contains("A0")) s.A0 = parse_matrix(j.at("A0"), "custom.A0");
  if (j.contains("P0")) s.P0 = parse_matrix(j.at("P0"), "custom.P0");
  if (j.contains("R")) s.R = parse_matrix(j.at("R"), "custom.R");
  try {
    validate(s);
  } catch (const Error& e) {
    fail(e.what());
  }
  return s;
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  if (!j.is_object()) fail("config: expected a JSON object");

  if (j.contains("g") && !j.contains("model")) {
    c.sve_params = parse_sve_parameters(j);
    c.k1 = opt_double(j, "k1", "sve");
    c.k2 = opt_double(j, "k2", "sve");
    return c;
  }

  check_keys(j, {"model", "sve", "k1", "k2", "K", "kappa", "sim", "alpha", "initial", "fit_window", "sweep", "seed",
                 "tolerances", "neighborhood"},
             "config");
  if (j.contains("model")) c.model = j.at("model").get<std::string>();
  if (c.model == "sve") {
    if (j.contains("sve")) {
      const json& s = j.at("sve");
      const json params = s.is_string() ? read_json(resolve(base_dir, s.get<std::string>())) : s;
      c.sve_params = parse_sve_parameters(params);
      c.k1 = opt_double(params, "k1", "sve");
      c.k2 = opt_double(params, "k2", "sve");
    }
  } else if (c.model.rfind("custom:", 0) == 0) {
    const fs::path path = resolve(base_dir, c.model.substr(7));
    c.custom = parse_custom_model(read_json(path));
  } else {
    fail("config.model: expected 'sve' or 'custom:<path>'");
  }

  if (auto v = opt_double(j, "k1", "config")) c.k1 = v;
  if (auto v = opt_double(j, "k2", "config")) c.k2 = v;
  if (c.k1.has_value() != c.k2.has_value()) fail("config: k1 and k2 must be given together");
  if (c.k1 && !c.is_sve()) fail("config: k1/k2 apply to the SVE model only");
  if (j.contains("K")) {
    const json& k = j.at("K");
    c.K = k.is_string() ? parse_matrix(read_json(resolve(base_dir, k.get<std::string>())), "K")
                        : parse_matrix(k, "K");
  }
  if (j.contains("kappa")) {
    const Vector k = parse_vector(j.at("kappa"), "kappa");
    if (k.size() != 2) fail("kappa: expected [kappa_plus, kappa_minus]");
    c.kappa = std::make_pair(k[0], k[1]);
  }
  if (static_cast<int>(c.k1.has_value()) + static_cast<int>(c.K.has_value()) + static_cast<int>(c.kappa.has_value()) > 1) {
    fail("config: give at most one of (k1, k2), K and kappa");
  }
  if (j.contains("sim")) parse_sim(j.at("sim"), c.sim);
  if (auto v = opt_double(j, "alpha", "config")) {
    if (!(*v > 0.0)) fail("config.alpha must be positive");
    c.alpha = v;
  }
  if (j.contains("initial")) parse_initial(j.at("initial"), c.initial);
  if (j.contains("fit_window")) {
    const Vector w = parse_vector(j.at("fit_window"), "fit_window");
    if (w.size() != 2 || !(w[1] > w[0])) fail("fit_window: expected [lo, hi] with hi > lo");
    c.fit_window = std::make_pair(w[0], w[1]);
  }
  if (j.contains("sweep")) parse_sweep(j.at("sweep"), c.sweep);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail("config.seed: expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    check_keys(t, {"structure", "gain"}, "tolerances");
    if (auto v = opt_double(t, "structure", "tolerances")) c.structure_tol = *v;
    if (auto v = opt_double(t, "gain", "tolerances")) c.gain_tol = *v;
  }
  if (j.contains("neighborhood")) {
    const json& nb = j.at("neighborhood");
    check_keys(nb, {"radius", "samples"}, "neighborhood");
    if (auto v = opt_double(nb, "radius", "neighborhood")) c.neighborhood_radius = *v;
    if (nb.contains("samples")) c.neighborhood_samples = static_cast<int>(get_integer(nb, "samples", "neighborhood"));
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) fail("config file not found: " + path.string());
  const json j = read_json(path);
  return parse_config(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

SystemModel build_model(const RunConfig& config) {
  if (config.custom) return make_affine_model(*config.custom);
  return sve::as_system_model(config.sve_params);
}

FeedbackGain build_gain(const RunConfig& config, const SystemModel& model) {
  const Index n = model.n;
  const Index m = reference_spectrum(model).m;
  if (config.k1) return sve::feedback_matrix(*config.k1, *config.k2, config.sve_params);
  if (config.K) {
    if (config.K->rows() != n || config.K->cols() != n) fail("K must be n x n");
    return FeedbackGain(*config.K, m);
  }
  if (config.kappa) return FeedbackGain::diagonal(n, m, config.kappa->first, config.kappa->second);
  return FeedbackGain::zero(n, m);
}

Matrix build_initial(const RunConfig& config, const Simulator& sim) {
  const TransformedSystem& sys = sim.system();
  const Index n = sys.n();
  std::vector<BumpComponent> comps = config.initial.components;
  if (comps.empty()) comps = {BumpComponent{1e-3, 0.5, 0.5}};
  if (comps.size() == 1) comps.assign(static_cast<std::size_t>(n), comps.front());
  if (static_cast<Index>(comps.size()) != n) fail("initial.components: expected 1 or n entries");

  Matrix map = Matrix::Identity(n, n);
  if (config.initial.space == "U") map = sys.P();
  if (config.initial.space == "xi") map = sys.spectrum0().L_inv;
  return sim.sample([&](double x) {
    Vector w(n);
    for (Index k = 0; k < n; ++k) {
      const BumpComponent& b = comps[static_cast<std::size_t>(k)];
      const double s = (x - b.center) / b.width;
      const double c = std::abs(s) < 0.5 ? std::cos(std::numbers::pi * s) : 0.0;
      w[k] = b.amplitude * c * c * c * c;
    }
    return Vector(map * w);
  });
}

std::pair<double, double> fit_window(const RunConfig& config) {
  if (config.fit_window) return *config.fit_window;
  return {0.25 * config.sim.t_end, config.sim.t_end};
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

}  // namespace pdstab::cli
