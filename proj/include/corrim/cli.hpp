#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corrim::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // domain errors (unknown node id, bad k, ...)
    kExitUsage = 2,    // command-line or input-file parse errors
    kExitBudget = 3,   // a size budget refused the computation
};

// Runs one CLI invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corrim::cli
