#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dsurf::cli {

enum ExitCode { kPass = 0, kInvariantFailure = 1, kInputError = 2, kResourceCap = 3 };

// Entry point of the dirac-surface tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsurf::cli
