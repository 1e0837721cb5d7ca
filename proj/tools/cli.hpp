#ifndef SREHM_TOOLS_CLI_HPP
#define SREHM_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace srehm::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageOrConfig = 1,
    kTraceError = 2,
    kInfeasible = 3,
    kNoConvergence = 4,
};

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srehm::cli

#endif  // SREHM_TOOLS_CLI_HPP
