#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corridor {

// Runs the command-line front end. Args exclude the program name. Exit codes:
// 0 success, 2 malformed input or model violation, 3 solver budget exceeded,
// 1 anything unexpected.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// argv variant used by main().
int run_cli(int argc, const char* const* argv);

}  // namespace corridor
