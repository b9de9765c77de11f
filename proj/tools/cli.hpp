#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sizesched::cli {

/// Exit codes of the `sizesched` tool.
enum ExitCode : int {
  kSuccess = 0,
  kBadConfig = 2,
  kInputError = 3,
  kSimulationError = 4,
};

/// Entry point; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sizesched::cli
