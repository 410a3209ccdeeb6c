#ifndef XRAYSEGKIT_CLI_HPP_
#define XRAYSEGKIT_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace xraysegkit {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/**
 * Runs the command line `args` (without the program name). Results go to
 * `out`; diagnostics go to `err` at the level named by XRAYSEGKIT_LOG
 * (error, warn, info or debug; default warn).
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_CLI_HPP_
