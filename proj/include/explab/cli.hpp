#pragma once

#include <iosfwd>

namespace explab {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 2,
  kExitInvariant = 3,
  kExitScale = 4,
  kExitUnsupported = 5,
};

// Runs the explab command line; reports go to `out` (unless --out is given),
// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace explab
