// Command-line front end.  Subcommands: list, run, attack, evaluate, cost,
// deduce, report.  Exit codes: 0 success, 1 failed check or underivable
// goal, 2 usage or input errors, 3 metadata-fidelity refusal, 4 unmet
// attack prerequisite.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFidelity = 3;
inline constexpr int kExitPrerequisite = 4;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wb
