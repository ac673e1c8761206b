#include "commands.hpp"
#include "config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace pdstab;
using namespace pdstab::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PDSTAB_TEST_DATA;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("pdstab_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json read(const fs::path& p) { return json::parse(slurp(p)); }

int tool(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + PDSTAB_TOOL_PATH + "\" --quiet --out \"" + out.string() + "\" " + args +
                          " > \"" + (out / "stdout.txt").string() + "\" 2> \"" + (out / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string cfg(const char* name) { return "--config \"" + (kData / name).string() + "\""; }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(int (*fn)(const RunConfig&, const Globals&, Streams), const RunConfig& c, const fs::path& dir) {
  std::ostringstream out, err;
  Globals g;
  g.out_dir = dir;
  g.quiet = true;
  Streams io{out, err};
  const int code = guarded([&]() { return fn(c, g, io); }, io);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Exit, UsageErrors) {
  TempDir d;
  EXPECT_EQ(tool("", d.path()), kUsage);
  EXPECT_EQ(tool("no-such-command", d.path()), kUsage);
  EXPECT_EQ(tool("check-structure --config \"" + (d.path() / "missing.json").string() + "\"", d.path()), kUsage);
  EXPECT_EQ(tool("simulate " + cfg("malformed.json"), d.path()), kUsage);
  EXPECT_EQ(tool("sweep " + cfg("sweep_empty.json"), d.path()), kUsage);
  EXPECT_EQ(tool("sweep " + cfg("sweep_nosection.json"), d.path()), kUsage);
  EXPECT_EQ(tool("check-gains --bogus-flag", d.path()), kUsage);
}

TEST(Exit, HelpIsSuccess) {
  TempDir d;
  EXPECT_EQ(tool("--help", d.path()), 0);
  EXPECT_NE(slurp(d.path() / "stdout.txt").find("check-structure"), std::string::npos);
}

TEST(CheckStructure, SveReferencePasses) {
  TempDir d;
  EXPECT_EQ(tool("check-structure " + cfg("sve_reference.json"), d.path()), kPass);
  const json j = read(d.path() / "structure.json");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["n"].get<int>(), 3);
  EXPECT_EQ(j["m"].get<int>(), 1);
  EXPECT_EQ(j["r"].get<int>(), 1);
  EXPECT_LT(j["lambda"][0].get<double>(), 0.0);
}

TEST(CheckStructure, DefaultConfigIsTheSveReference) {
  TempDir a, b;
  EXPECT_EQ(tool("check-structure", a.path()), kPass);
  EXPECT_EQ(tool("check-structure " + cfg("sve_reference.json"), b.path()), kPass);
  EXPECT_EQ(slurp(a.path() / "structure.json"), slurp(b.path() / "structure.json"));
}

TEST(CheckStructure, SingularDissipativeBlockIsAModelError) {
  TempDir d;
  EXPECT_EQ(tool("check-structure " + cfg("custom_singular.json"), d.path()), kModelError);
  EXPECT_FALSE(slurp(d.path() / "stderr.txt").empty());
}

TEST(CheckStructure, NonPhysicalParametersAreAModelError) {
  TempDir d;
  EXPECT_EQ(tool("check-structure " + cfg("sve_dry.json"), d.path()), kModelError);
}

TEST(CheckGains, ExitCodes) {
  TempDir d;
  EXPECT_EQ(tool("check-gains " + cfg("gains_zero.json"), d.path()), kPass);
  EXPECT_TRUE(read(d.path() / "gains.json")["passed"].get<bool>());
  EXPECT_EQ(tool("check-gains " + cfg("gains_admissible.json"), d.path()), kPass);
  const json ok = read(d.path() / "gains.json");
  EXPECT_TRUE(ok["passed"].get<bool>());
  EXPECT_TRUE(ok["general"]["pd1"].get<bool>());
  EXPECT_TRUE(ok["general"]["pd2"].get<bool>());
  EXPECT_EQ(tool("check-gains " + cfg("gains_inadmissible.json"), d.path()), kConditionFail);
  EXPECT_FALSE(read(d.path() / "gains.json")["passed"].get<bool>());
}

TEST(CheckGains, JsonOnStdout) {
  TempDir d;
  const std::string cmd = std::string("\"") + PDSTAB_TOOL_PATH + "\" --json --out \"" + d.path().string() +
                          "\" check-gains " + cfg("gains_admissible.json") + " > \"" +
                          (d.path() / "report.json").string() + "\"";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  const json j = read(d.path() / "report.json");
  EXPECT_EQ(j["command"].get<std::string>(), "check-gains");
  EXPECT_EQ(j, read(d.path() / "gains.json"));
}

TEST(Simulate, EquilibriumStaysAtRest) {
  TempDir d;
  RunConfig c = load_config(kData / "simulate_equilibrium.json");
  c.initial.components = {BumpComponent{0.0, 0.5, 0.5}};
  const Result r = call(cmd_simulate, c, d.path());
  EXPECT_EQ(r.code, kPass) << r.err;
  const json j = read(d.path() / "simulate.json");
  EXPECT_EQ(j["termination"].get<std::string>(), "completed");
  EXPECT_EQ(j["max_abs_V"].get<double>(), 0.0);
  EXPECT_TRUE(j["fit"]["nu_hat"].is_null());
  for (const char* f : {"trajectory.csv", "boundary.csv", "lyapunov.csv", "decay.dat", "decay.gp", "fit.json"}) {
    EXPECT_TRUE(fs::exists(d.path() / f)) << f;
  }
}

TEST(Simulate, ShortRunDecays) {
  TempDir d;
  EXPECT_EQ(tool("simulate " + cfg("simulate_short.json"), d.path()), kPass);
  const json j = read(d.path() / "simulate.json");
  EXPECT_EQ(j["max_boundary_residual"].get<double>(), 0.0);
  EXPECT_LE(j["max_physical_boundary_residual"].get<double>(), 1e-10);
  EXPECT_GT(j["fit"]["nu_hat"].get<double>(), 0.0);
  EXPECT_TRUE(j["monotone"].get<bool>());

  const std::string csv = slurp(d.path() / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,V_1,V_2,V_3,U_1,U_2,U_3");
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  std::istringstream cells(line);
  std::string cell;
  std::getline(cells, cell, ',');
  std::getline(cells, cell, ',');
  EXPECT_EQ(cell, "0.0078125");
}

TEST(Simulate, Deterministic) {
  TempDir a, b;
  ASSERT_EQ(tool("simulate " + cfg("simulate_short.json"), a.path()), kPass);
  ASSERT_EQ(tool("simulate " + cfg("simulate_short.json"), b.path()), kPass);
  for (const char* f : {"trajectory.csv", "boundary.csv", "lyapunov.csv", "fit.json", "simulate.json"}) {
    if (std::string(f) == "simulate.json") continue;
    EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
  }
}

TEST(Simulate, DestabilizingGainBlowsUp) {
  TempDir d;
  EXPECT_EQ(tool("simulate " + cfg("simulate_blowup.json"), d.path()), kBlowUp);
  const json j = read(d.path() / "simulate.json");
  EXPECT_EQ(j["termination"].get<std::string>(), "blow-up");
}

TEST(Sweep, CoarseGrid) {
  TempDir d;
  ASSERT_EQ(tool("sweep " + cfg("sweep_coarse.json"), d.path()), kPass);
  const json j = read(d.path() / "sweep.json");
  EXPECT_EQ(j["points"].get<int>(), 81);
  EXPECT_EQ(j["errors"].get<int>(), 0);
  EXPECT_GT(j["admissible_exact"].get<int>(), 0);

  std::istringstream csv(slurp(d.path() / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "k1,k2,admissible_sufficient,admissible_exact,nu_hat");
  int rows = 0, exact = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string k1, k2, suff, ex, nu;
    std::getline(cells, k1, ',');
    std::getline(cells, k2, ',');
    std::getline(cells, suff, ',');
    std::getline(cells, ex, ',');
    std::getline(cells, nu, ',');
    if (suff == "1") EXPECT_EQ(ex, "1") << line;
    if (ex == "1") {
      ++exact;
      EXPECT_GT(std::stod(nu), 0.0) << line;
    } else {
      EXPECT_EQ(nu, "NaN") << line;
    }
  }
  EXPECT_EQ(rows, 81);
  EXPECT_EQ(exact, j["admissible_exact"].get<int>());
  EXPECT_EQ(j["decaying"].get<int>(), exact);
}

TEST(Sweep, WorkerCountDoesNotChangeOutput) {
  TempDir a, b;
  RunConfig c = load_config(kData / "sweep_coarse.json");
  c.sweep->simulate = false;
  c.sweep->workers = 1;
  ASSERT_EQ(call(cmd_sweep, c, a.path()).code, kPass);
  c.sweep->workers = 8;
  ASSERT_EQ(call(cmd_sweep, c, b.path()).code, kPass);
  EXPECT_EQ(slurp(a.path() / "sweep.csv"), slurp(b.path() / "sweep.csv"));
  EXPECT_EQ(slurp(a.path() / "sweep.json"), slurp(b.path() / "sweep.json"));
}

TEST(SveDesign, MatchesGoldenFile) {
  TempDir d;
  ASSERT_EQ(tool("sve-design " + cfg("sve_admissible.json"), d.path()), kPass);
  EXPECT_EQ(slurp(d.path() / "design.json"), slurp(kData / "golden" / "design.json"));
}

TEST(SveDesign, ReferenceDigits) {
  TempDir d;
  ASSERT_EQ(call(cmd_sve_design, load_config(kData / "sve_reference.json"), d.path()).code, kPass);
  const json j = read(d.path() / "design.json");
  EXPECT_NEAR(j["diagonal_gain_bounds"]["kappa_plus_sq"].get<double>(), 0.015954341354393005, 1e-15);
  EXPECT_NEAR(j["diagonal_gain_bounds"]["kappa_minus_sq"].get<double>(), 0.11723742483899507, 1e-15);
  EXPECT_NEAR(j["X"][0].get<double>(), 0.5785454894684506, 1e-12);
  EXPECT_NEAR(j["X"][1].get<double>(), 0.0009305358483222341, 1e-12);
  EXPECT_NEAR(j["X"][2].get<double>(), 0.42052397468322716, 1e-12);
  EXPECT_LE(std::abs(j["vieta_residuals"]["product"].get<double>()), 1e-10);
  EXPECT_FALSE(j.contains("gains"));
}

TEST(SveDesign, RoundTripsThroughJson) {
  TempDir d;
  ASSERT_EQ(call(cmd_sve_design, load_config(kData / "sve_admissible.json"), d.path()).code, kPass);
  const std::string text = slurp(d.path() / "design.json");
  const json j = json::parse(text);
  EXPECT_EQ(j.dump(2) + "\n", text);
  const sve::SveParameters p = parse_sve_parameters(j["parameters"]);
  const sve::SveParameters ref = sve::reference_parameters();
  EXPECT_EQ(p.g, ref.g);
  EXPECT_EQ(p.a, ref.a);
  EXPECT_EQ(p.S_b, ref.S_b);
  EXPECT_EQ(p.C_f, ref.C_f);
}

TEST(SveDesign, InvalidParametersAreAModelError) {
  TempDir d;
  EXPECT_EQ(tool("sve-design " + cfg("sve_dry.json"), d.path()), kModelError);
}

TEST(SveDesign, InadmissibleGainsFailTheCondition) {
  TempDir d;
  RunConfig c = load_config(kData / "sve_reference.json");
  c.k1 = 0.0;
  c.k2 = 0.0;
  EXPECT_EQ(call(cmd_sve_design, c, d.path()).code, kConditionFail);
}

TEST(SveDesign, CustomModelIsAUsageError) {
  TempDir d;
  EXPECT_EQ(tool("sve-design " + cfg("custom_singular.json"), d.path()), kUsage);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(json::parse(R"({"model": "sve", "bogus": 1})"), "."), UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"model": "sve", "sim": {"bogus": 1}})"), "."), UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"model": "other"})"), "."), UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"model": "sve", "k1": 1.0})"), "."), UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"model": "sve", "k1": 1.0, "k2": 1.0, "kappa": [0, 0]})"), "."),
               UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"model": "sve", "sim": {"N": 0}})"), "."), UsageError);
  EXPECT_THROW(parse_config(json::parse(R"({"model": "sve", "initial": {"amplitude": 1.0}})"), "."), UsageError);
  EXPECT_NO_THROW(
      parse_config(json::parse(R"({"model": "sve", "initial": {"amplitude": 1.0, "allow_large": true}})"), "."));
}

TEST(Config, AxisValues) {
  GridAxis a{-1.0, 1.0, 5};
  const std::vector<double> v = a.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v.front(), -1.0);
  EXPECT_EQ(v[2], 0.0);
  EXPECT_EQ(v.back(), 1.0);
  EXPECT_EQ((GridAxis{2.0, 2.0, 1}.values()), std::vector<double>{2.0});
}

TEST(Config, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::BlowUp), kBlowUp);
  EXPECT_EQ(exit_code_for(ErrorCode::SNotInvertible), kModelError);
  EXPECT_EQ(exit_code_for(ErrorCode::A0NotSPD), kModelError);
}
