#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/run_config.hpp"

namespace backflow::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericalFailure = 3,
    kInadmissible = 4,
};

/// Parses arguments (without the program name) and runs the command.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs an already resolved configuration.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace backflow::cli
