#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace matspace {

/// Exit statuses of run_command.
enum ExitCode : int {
  kExitOk = 0,
  /// The analysis was refused: field too small, cap exceeded, or sampling
  /// was inconclusive.
  kExitRefused = 1,
  kExitInput = 2,
  /// An internal consistency check failed.
  kExitInternal = 3,
};

/// Runs one subcommand; `args` excludes the program name. The report goes to
/// `out` only when the command succeeds; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matspace
