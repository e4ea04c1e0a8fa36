#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace netmon::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kInternalError = 1, kUsageError = 2 };

/// Runs the command line `args` (args[0] is the program name). Diagnostics
/// go to `err`, human-readable results to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netmon::cli
