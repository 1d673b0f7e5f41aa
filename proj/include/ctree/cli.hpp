#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ctree {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGuard = 3;
inline constexpr int kExitIo = 4;

/// Entry point of the `ctree` tool. `args` excludes the program name.
/// Subcommands: gen, mast, construct, chain, martingale, beta, experiment.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctree
