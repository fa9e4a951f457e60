#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ribbon::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kGeometryError = 3,
  kNoVariation = 4,
  kCalibrationError = 5,
};

/// Runs the command line `args` (without the program name). Output files go
/// where the flags say; `out` receives stdout-style output, `err` logs.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace ribbon::cli
