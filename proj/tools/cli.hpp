#pragma once

#include <ostream>

namespace rydlat::cli {

// Exit statuses of the command-line tool.
enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericError = 3 };

// Parses argv, runs the selected subcommand and writes its outputs.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rydlat::cli
