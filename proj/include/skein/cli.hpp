#pragma once

#include <iosfwd>

namespace skein {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Runs the skein command line. Reports on `out`/`err` instead of the process streams, so
/// tests can drive it in-process. `in` feeds the protocol server.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skein
