#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kerrqnd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParameter = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the command line `args` (without the program name). CSV goes to the
/// --out file when given, else to `out`; the human summary goes to `out` when
/// the CSV has its own file and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits.
std::string format_number(double v);

}  // namespace kerrqnd::cli
