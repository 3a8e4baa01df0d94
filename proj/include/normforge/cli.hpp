#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace normforge::cli {

enum ExitStatus : int {
    kSuccess = 0,
    kVerdictNegative = 1,
    kInputError = 2,
    kInternalError = 3,
};

// Runs one command line (without the program name). Machine output goes to
// `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace normforge::cli
