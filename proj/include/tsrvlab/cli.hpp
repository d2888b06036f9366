#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsrv {

/// Process exit codes.
enum ExitCode : int
{
  ExitOk = 0,
  ExitFailure = 1,
  ExitConfig = 2,
  ExitData = 3,
  ExitCheckFailed = 4,
};

/// Runs the command line `args` (without the program name).
/// Subcommands: simulate | tsrv | ingest | experiment <name>.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tsrv
