#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evtrace {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOnFail = 1;
inline constexpr int kExitError = 2;

/// Runs the `evtrace` command line. `args` excludes the program name.
/// EVTRACE_MAX_EVENTS is read from the environment.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace evtrace
