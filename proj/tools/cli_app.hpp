#pragma once

#include <string>
#include <vector>

namespace hvdflow::cli {

// Parses and executes one CLI invocation; args exclude the program name.
// Returns 0 on success, 1 on usage errors, 2 on runtime failures.
int run(std::vector<std::string> args);

}  // namespace hvdflow::cli
