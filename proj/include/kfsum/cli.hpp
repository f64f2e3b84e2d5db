#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kfsum::cli {

inline constexpr const char* kToolName = "kfsum";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParameter = 2;
inline constexpr int kExitBudget = 3;

/// Runs one subcommand. args excludes the program name. The report goes to
/// out (or to --output), diagnostics and usage text to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kfsum::cli
