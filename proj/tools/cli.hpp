#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace urvc::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

/// args excludes the program name. Reports go to out (or --out DIR),
/// diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Applies URVC_SIM_LOG (trace|debug|info|warn|error|off) to the default logger.
void configure_logging();

} // namespace urvc::cli
