#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace predictsched {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;  // bad arguments or unreadable input file

/// Runs one command line (args[0] is the program name). Returns the exit
/// status; normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace predictsched
