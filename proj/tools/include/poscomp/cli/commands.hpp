#pragma once

#include <string>

#include "poscomp/cli/config.hpp"
#include "poscomp/cli/emit.hpp"

namespace poscomp::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitDegenerate = 2 };

struct CommandResult {
  FileSet files;
  int exit_code = kExitOk;
  std::string message;
};

CommandResult cmd_game(const GameConfig& cfg);
CommandResult cmd_figure1(const Figure1Config& cfg);
CommandResult cmd_figure2(const Figure2Config& cfg);
CommandResult cmd_simulate(const SimulateConfig& cfg);
CommandResult cmd_policy(const PolicyConfig& cfg, int workers = 1);

// Dispatches by name, filters by cfg.output.formats and adds config.json.
// Throws ConfigError if the section is absent.
CommandResult run_command(const std::string& name, const RunConfig& cfg);

}  // namespace poscomp::cli
