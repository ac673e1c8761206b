#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace pdstab::cli;

int main(int argc, char** argv) {
  CLI::App app{"Boundary feedback stabilization toolkit", "pdstab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool quiet = false;
  bool json_out = false;
  app.add_option("--config", config_path, "JSON config or SVE parameter file");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--quiet", quiet, "suppress the text summary");
  app.add_flag("--json", json_out, "print the report as JSON");

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, const Globals&, Streams);
  };
  const Entry entries[] = {
      {"check-structure", "check the partially dissipative structure at the equilibrium", cmd_check_structure},
      {"check-gains", "check the boundary gain conditions", cmd_check_gains},
      {"simulate", "simulate the closed loop and fit the decay rate", cmd_simulate},
      {"sweep", "admissibility and decay over a grid of gains", cmd_sweep},
      {"sve-design", "Saint-Venant-Exner design quantities", cmd_sve_design},
  };
  for (const Entry& e : entries) app.add_subcommand(e.name, e.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  Streams io{std::cout, std::cerr};
  Globals g;
  g.out_dir = out_dir;
  g.quiet = quiet;
  g.json_stdout = json_out;
  for (const Entry& e : entries) {
    if (!app.got_subcommand(e.name)) continue;
    return guarded(
        [&]() {
          const RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
          return e.fn(config, g, io);
        },
        io);
  }
  return kUsage;
}
