#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace detline::cli {

// Runs the command line (args excludes the program name). Returns the exit
// code: 0 success, 1 computation error, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace detline::cli
