#pragma once

#include "config.hpp"

#include "pdstab/error.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>

namespace pdstab::cli {

enum ExitCode : int {
  kPass = 0,
  kConditionFail = 1,
  kModelError = 2,
  kBlowUp = 3,
  kUsage = 64,
};

struct Globals {
  std::filesystem::path out_dir = ".";
  bool quiet = false;
  bool json_stdout = false;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_check_structure(const RunConfig& config, const Globals& g, Streams io);
int cmd_check_gains(const RunConfig& config, const Globals& g, Streams io);
int cmd_simulate(const RunConfig& config, const Globals& g, Streams io);
int cmd_sweep(const RunConfig& config, const Globals& g, Streams io);
int cmd_sve_design(const RunConfig& config, const Globals& g, Streams io);

/// Runs `fn`, mapping UsageError to 64, BlowUp and SpectralFailure to 3 and
/// other model errors to 2; the message goes to io.err.
int guarded(const std::function<int()>& fn, Streams io);

int exit_code_for(ErrorCode code);

}  // namespace pdstab::cli
