#pragma once

#include <ostream>

namespace provabs {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitNegative = 1,
  kExitInvalid = 2,
  kExitInfeasible = 3,
  kExitCap = 4,
};

// Runs the tool with argv-style arguments. Data goes to `out`, diagnostics to
// `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace provabs
