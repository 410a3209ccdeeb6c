#ifndef XRAYSEGKIT_CLI_COMMANDS_HPP_
#define XRAYSEGKIT_CLI_COMMANDS_HPP_

#include <CLI11.hpp>

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace xraysegkit::cli {

/// Bad flag values detected after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Command {
    CLI::App* app = nullptr;
    std::function<int()> run;
};

void add_segment_command(CLI::App& app, std::ostream& out, std::vector<Command>& commands);
void add_labels_commands(CLI::App& app, std::ostream& out, std::vector<Command>& commands);
void add_eval_command(CLI::App& app, std::ostream& out, std::vector<Command>& commands);
void add_serve_command(CLI::App& app, std::ostream& out, std::vector<Command>& commands);

}  // namespace xraysegkit::cli

#endif  // XRAYSEGKIT_CLI_COMMANDS_HPP_
