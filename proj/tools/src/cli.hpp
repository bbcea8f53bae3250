#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaoswave::cli {

/// Parses arguments, runs one subcommand and returns the process exit code.
/// Progress goes to `out`, errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaoswave::cli
