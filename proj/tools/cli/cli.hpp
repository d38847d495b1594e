#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctrltab::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

/// Runs one command line (args exclude the program name). Results go to
/// `out`, usage and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ctrltab::cli
