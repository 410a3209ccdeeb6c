#include "commands.hpp"

#include <xraysegkit/cli.hpp>
#include <xraysegkit/dataset.hpp>
#include <xraysegkit/image.hpp>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <ostream>

namespace xraysegkit {

namespace {

spdlog::level::level_enum level_from_env()
{
    const char* value = std::getenv("XRAYSEGKIT_LOG");
    const std::string name = value ? value : "";
    if (name == "error") {
        return spdlog::level::err;
    }
    if (name == "info") {
        return spdlog::level::info;
    }
    if (name == "debug") {
        return spdlog::level::debug;
    }
    return spdlog::level::warn;
}

// Routes the default logger to `err` for the lifetime of one invocation.
class LoggerScope {
  public:
    explicit LoggerScope(std::ostream& err) : previous_(spdlog::default_logger())
    {
        auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
        sink->set_pattern("%l: %v");
        auto logger = std::make_shared<spdlog::logger>("xraysegkit", sink);
        logger->set_level(level_from_env());
        spdlog::set_default_logger(logger);
    }
    ~LoggerScope() { spdlog::set_default_logger(previous_); }
    LoggerScope(const LoggerScope&) = delete;
    LoggerScope& operator=(const LoggerScope&) = delete;

  private:
    std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    LoggerScope logging(err);

    CLI::App app{"Classical X-ray segmentation, YOLO polygon labels and detection metrics", "xraysegkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");
    std::vector<cli::Command> commands;
    cli::add_segment_command(app, out, commands);
    cli::add_labels_commands(app, out, commands);
    cli::add_eval_command(app, out, commands);
    cli::add_serve_command(app, out, commands);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    for (const auto& command : commands) {
        if (!command.app->parsed()) {
            continue;
        }
        try {
            return command.run();
        } catch (const cli::UsageError& e) {
            spdlog::error("{}", e.what());
            err << command.app->help();
            return kExitUsage;
        } catch (const DatasetError& e) {
            spdlog::error("{}", e.what());
            for (const auto& d : e.details()) {
                err << "  " << d << "\n";
            }
            return kExitFailure;
        } catch (const std::exception& e) {
            spdlog::error("{}", e.what());
            return kExitFailure;
        }
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace xraysegkit
