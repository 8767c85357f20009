#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kldsel::cli {

inline constexpr const char* library_version = "0.1.0";

enum ExitCode : int
{
  exit_ok = 0,
  exit_usage = 1,
  exit_data = 2,
  exit_numeric = 3,
};

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// --out when given, otherwise to `out`; diagnostics go to `err`.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One observation per line. Blank lines and lines starting with '#' are
/// skipped; a non-numeric first data line is taken as a header. Any other
/// non-numeric line throws DomainError naming `source` and the line number.
std::vector<double> read_observations(std::istream& in, const std::string& source);

std::vector<double> read_observations_file(const std::string& path);

/// Rounds to 9 significant digits.
double round_sig9(double x);

} // namespace kldsel::cli
