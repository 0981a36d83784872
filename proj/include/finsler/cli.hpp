#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace finsler {

// Exit codes of the command-line runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitConfig = 2;

/// Runs one CLI invocation. `args` excludes the program name. Records go to
/// `out` as space-separated key=value lines; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finsler
