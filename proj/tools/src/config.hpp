#pragma once

#include "pdstab/affine_model.hpp"
#include "pdstab/feedback.hpp"
#include "pdstab/simulator.hpp"
#include "pdstab/sve.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdstab::cli {

using json = nlohmann::ordered_json;

/// Malformed configuration or missing file; maps to exit code 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BumpComponent {
  double amplitude = 0.0;
  double center = 0.5;
  double width = 0.5;
};

// u_k(x) = amplitude cos^4(pi (x - center) / width) on |x - center| < width / 2
struct InitialSpec {
  std::string space = "U";  // "U", "V" or "xi"
  std::vector<BumpComponent> components;
  double amplitude_cap = 1e-2;
  bool allow_large = false;
};

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> values() const;
};

struct SweepSpec {
  std::string kind = "k";  // "k": SVE (k1, k2); "kappa": diagonal family
  GridAxis first;
  GridAxis second;
  int workers = 2;
  bool simulate = true;
  std::optional<Index> N;
  std::optional<double> t_end;
};

struct RunConfig {
  std::filesystem::path base_dir = ".";
  std::string model = "sve";
  sve::SveParameters sve_params = sve::reference_parameters();
  std::optional<AffineModelSpec> custom;
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<Matrix> K;
  std::optional<std::pair<double, double>> kappa;
  SimConfig sim;
  std::optional<double> alpha;
  InitialSpec initial;
  std::optional<std::pair<double, double>> fit_window;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 0;
  double structure_tol = 1e-9;
  double gain_tol = 0.0;
  double neighborhood_radius = 1e-2;
  int neighborhood_samples = 64;

  bool is_sve() const { return model == "sve"; }
};

/// Reads and validates a config file; paths inside resolve against its
/// directory. A bare SVE parameter file is accepted as a config.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const json& j, const std::filesystem::path& base_dir);
/// Defaults only: SVE reference parameters, zero gain.
RunConfig default_config();

sve::SveParameters parse_sve_parameters(const json& j);
AffineModelSpec parse_custom_model(const json& j);

SystemModel build_model(const RunConfig& config);
FeedbackGain build_gain(const RunConfig& config, const SystemModel& model);
/// Cell-centre values of the configured bump in V coordinates.
Matrix build_initial(const RunConfig& config, const Simulator& sim);
std::pair<double, double> fit_window(const RunConfig& config);

json to_json(const Matrix& m);
json to_json(const Vector& v);
/// Non-finite values become null.
json number(double v);

}  // namespace pdstab::cli
