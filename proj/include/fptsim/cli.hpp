#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fptsim {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_threshold = 2 };

/// Runs the `fptsim` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip, locale-independent rendering of a double.
std::string format_real(double x);

/// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace fptsim
