#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmit {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3 };

/// Entry point of the `bmit` tool with the program name stripped from
/// `args`. Reports go to `out`, diagnostics to `err`; "-" as the data
/// argument reads from `in`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace bmit
