#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace toricsym {

// Runs one command line (without the program name).  Returns the process exit code:
// 0 on success, 2 when classification fails, 1 for any other error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toricsym
