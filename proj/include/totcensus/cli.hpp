// cli.hpp
// Command-line front end. Kept as a library function so tests can drive
// the full argument-to-output path in process.
//
// Exit codes: 0 success, 2 usage / domain error, 3 resource budget overrun,
// 1 anything else.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace totcensus {

// `args` excludes the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace totcensus
