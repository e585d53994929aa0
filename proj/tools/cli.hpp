#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pixelhand::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kParseFailure = 2,
  kConstraintFailure = 3,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pixelhand::cli
