#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcnet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumerical = 4,
};

/// Runs the command line `args` (without the program name). Errors are reported on `err`
/// and mapped to an exit code instead of propagating.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace gcnet::cli
