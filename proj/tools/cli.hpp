#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace redmat::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kUsageError = 2,
    kMechanism = 3,
    kInvariantFailure = 4,
};

/// Runs the command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace redmat::cli
