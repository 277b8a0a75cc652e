#pragma once

#include <iosfwd>

namespace spadnet::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 2,
  exit_io = 3,
  exit_data = 4,
};

/// Parses and runs one subcommand. Command output (detect-bits, eval summary)
/// goes to `out`; usage errors go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spadnet::cli
