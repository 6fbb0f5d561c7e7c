#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsrnet::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitMismatch = 4;

// Runs one command line (args excludes the program name). Records go to
// `out` unless the command writes to a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsrnet::cli
