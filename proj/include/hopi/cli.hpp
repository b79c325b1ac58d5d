#pragma once

// The `hopi` command line, callable in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace hopi {

/// Exit codes: 0 pass or bisimilar, 1 usage, parse or sort error,
/// 2 distinguished (or a failing claim), 3 inconclusive.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitDistinguished = 2, kExitInconclusive = 3 };

/// Runs one command. `args` excludes the program name. Terms given as "-"
/// are read from `in`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace hopi
