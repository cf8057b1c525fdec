#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace battlytics {

enum ExitCode : int { kExitOk = 0, kExitNoOutput = 1, kExitFatal = 2 };

/// Runs the command line (without the program name). Results go to `out` when no
/// output path is given; diagnostics and stats go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace battlytics
