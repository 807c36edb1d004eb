#pragma once

#include <ostream>

namespace infomenu::cli {

enum ExitCode : int {
  kOk = 0,
  kFail = 2,
  kNumerical = 3,
  kUsage = 64,
};

// Runs one command. JSON goes to out (or the --output file), diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infomenu::cli
