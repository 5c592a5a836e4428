#pragma once

#include <string>
#include <vector>

namespace gufic::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kSimulationError = 2, kAuditFailure = 3 };

/// Entry point of the `gufic` tool; args excludes the program name.
int run_scenario_cli(const std::vector<std::string>& args);

}  // namespace gufic::cli
