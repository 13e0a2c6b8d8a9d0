#ifndef ZREACH_TOOLS_CLI_HPP
#define ZREACH_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace zreach::cli
{

enum ExitCode : int
{
    kOk = 0,
    kViolations = 1,
    kBadInput = 2,
    kNumeric = 3
};

/// Runs one command. Logs go to `err`; `out` receives exactly one JSON
/// status line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace zreach::cli

#endif
