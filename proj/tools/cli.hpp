#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace butterfly_lab::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

// Runs one butterfly-lab invocation. `args` excludes the program name. Normal output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace butterfly_lab::cli
