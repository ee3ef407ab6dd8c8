#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace greenfcc::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kFailure = 1, kNotConverged = 2 };

/// Runs `greenfcc <eval|sweep|compare|convergence> [flags]`. Records go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a `key=value` config file into flag tokens (`--key`, value...).
/// Blank lines and lines starting with '#' are skipped.
std::vector<std::string> config_tokens(const std::string& path);

}  // namespace greenfcc::cli
