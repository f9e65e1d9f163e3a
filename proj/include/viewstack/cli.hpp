#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace viewstack {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  /// A landscape differs from its baseline by more than the tolerance.
  kExitDiff = 1,
  kExitInvalid = 2,
  kExitIo = 3,
};

/// Runs the command-line tool. `args[0]` is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace viewstack
