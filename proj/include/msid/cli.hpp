#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace msid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kVersion = "1.0.0";

// Runs one subcommand (mine, decompose, sweep, analyze). args[0] is the
// program name. Returns 0 on success, 2 on usage errors and 1 when the
// pipeline fails.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace msid::cli
