#pragma once

#include <iosfwd>

namespace pbf {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

/// Entry point of the `pbf` tool. Results go to `out`, diagnostics and the
/// effective seed to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pbf
