#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fhn::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_violation = 3 };

/// Whole command line after the program name, e.g. {"cycles", "--a", "0.3"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fhn::cli
