#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ehc {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

/// Entry point of the ehcsim command line. `args[0]` is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ehc
