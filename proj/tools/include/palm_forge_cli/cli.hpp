#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace palm_forge::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kGate = 3 };

/// Parses argv, runs the subcommand, writes report.json and results.csv to
/// --out and a summary to `out`. Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace palm_forge::cli
