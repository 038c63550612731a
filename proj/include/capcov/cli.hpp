#pragma once

#include <iosfwd>

namespace capcov {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitLpSize = 3;
inline constexpr int kExitOracle = 4;
inline constexpr int kExitBoundViolation = 5;

// Entry point of the `capcov` tool; data goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace capcov
