#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quenchcorr::cli {

enum ExitCode : int { kOk = 0, kInvalid = 2, kNumerical = 3 };

// Runs one command line (without the program name). CSV goes to `out` unless
// --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads a flat key=value file. Blank lines and lines starting with '#' are
// ignored. Keys are flag names without the leading dashes.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

} // namespace quenchcorr::cli
