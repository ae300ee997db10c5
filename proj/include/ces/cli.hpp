#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ces {

// Runs one command line (without the program name).
// Exit status: 0 success, 1 failure or violation, 2 usage or parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ces
