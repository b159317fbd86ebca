#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ou::cli {

enum ExitCode : int { ok = 0, usage_error = 1, validation_error = 2, ambiguous_rank = 3 };

/// Parses `args` (without the program name), runs the subcommand and writes its report to `out`.
/// Diagnostics go to `err`. Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ou::cli
