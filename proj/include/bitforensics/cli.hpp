#pragma once
// Command-line front end. Subcommands: align, diagnose, fit, predict,
// eval-det, eval-cause, tally.

#include <iosfwd>
#include <string>
#include <vector>

namespace bitforensics::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one invocation. `args` excludes the program name. Reports go to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bitforensics::cli
