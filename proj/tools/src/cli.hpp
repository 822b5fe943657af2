#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmrpm/json_io.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigError = 2, kResourceExceeded = 3 };

/// Parses arguments (args[0] is the program name), runs the selected suites, writes the
/// report and prints a summary to `out`. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The versioned report document.
json::Json assemble_report(const std::string& command, std::uint64_t seed, unsigned moment_order,
                           std::uint64_t budget, const std::vector<CheckReport>& checks,
                           const std::vector<CheckReport>& diagnostics, bool with_timing);

/// Writes `text` to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& text);

/// One CSV row per check; rationals both as "p/q" and as decimals. A header-only file for
/// an empty list. Errors name the path.
void emit_tables(const std::vector<CheckReport>& checks, const std::filesystem::path& path);
std::string render_table_csv(const std::vector<CheckReport>& checks);

}  // namespace qmrpm::cli
