#pragma once

#include <string>
#include <vector>

namespace relayopt {

/// Command-line entry point. Returns the process exit code:
/// 0 success, 2 invalid input, 3 infeasible target, 4 internal diagnostic.
int cli_dispatch(int argc, const char* const* argv);

/// Test-friendly overload; `args` excludes the program name.
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace relayopt
