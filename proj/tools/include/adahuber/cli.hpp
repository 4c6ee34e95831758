#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adahuber::cli {

/// Exit codes shared by all subcommands.
enum Exit : int {
  ok = 0,
  error = 1,
  not_converged = 2,
  no_selection = 3,
  property_failed = 4,
};

/// Runs the command line `args` (without the program name). Diagnostics go
/// to `err`, human-readable summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adahuber::cli
