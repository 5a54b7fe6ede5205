#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shardsim::cli {

enum ExitCode : int {
  kOk = 0,
  kBadInput = 2,     // invalid parameters or unreadable/malformed config
  kInfeasible = 3,   // scenario cannot be bootstrapped
};

/// Entry point behind the `shardsim` executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shardsim::cli
