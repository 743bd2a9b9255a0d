#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdsr::cli {

/// Process exit codes.
enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kModelError = 2,
  kAborted = 3,
  kNodeFailures = 4,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Errors go to `err` as "cdsr: error[Tag]: message".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdsr::cli
