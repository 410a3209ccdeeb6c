#include "commands.hpp"

#include <xraysegkit/cli.hpp>
#include <xraysegkit/service.hpp>

#include <spdlog/spdlog.h>

#include <csignal>
#include <memory>
#include <ostream>
#include <pthread.h>
#include <thread>

namespace xraysegkit::cli {

namespace {

struct ServeOptions {
    std::string descriptor;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string ui_dir;
    unsigned threads = 8;
};

int run(const ServeOptions& opt, std::ostream& out)
{
    if (opt.port < 0 || opt.port > 65535) {
        throw UsageError("--port must lie in [0, 65535]");
    }
    if (opt.threads == 0) {
        throw UsageError("--threads must be at least 1");
    }

    // Block the shutdown signals before any thread starts so only the
    // waiter below receives them. SIGUSR1 wakes it when the server stops
    // on its own.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGUSR1);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);
    struct RestoreMask {
        sigset_t mask;
        ~RestoreMask() { pthread_sigmask(SIG_SETMASK, &mask, nullptr); }
    } restore{previous};

    AnnotationStore store(opt.descriptor);
    AnnotationServer server(store, {opt.host, opt.port, opt.ui_dir, opt.threads});
    if (!server.bind()) {
        spdlog::error("cannot bind {}:{}", opt.host, opt.port);
        return kExitFailure;
    }
    out << "listening on http://" << opt.host << ":" << server.port() << std::endl;

    std::thread waiter([&server, &signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        if (sig != SIGUSR1) {
            spdlog::info("signal {} received, shutting down", sig);
        }
        server.stop();
    });
    server.listen();
    pthread_kill(waiter.native_handle(), SIGUSR1);
    waiter.join();
    spdlog::info("stopped");
    return kExitOk;
}

}  // namespace

void add_serve_command(CLI::App& app, std::ostream& out, std::vector<Command>& commands)
{
    auto opt = std::make_shared<ServeOptions>();
    CLI::App* sub = app.add_subcommand("serve", "Run the annotation service");
    sub->add_option("--dataset", opt->descriptor, "Dataset descriptor file")->required();
    sub->add_option("--host", opt->host, "Address to bind")->capture_default_str();
    sub->add_option("--port", opt->port, "Port (0 picks a free one)")->capture_default_str();
    sub->add_option("--ui-dir", opt->ui_dir, "Directory served at / (annotator bundle)");
    sub->add_option("--threads", opt->threads, "Request worker threads")->capture_default_str();
    commands.push_back({sub, [opt, &out] { return run(*opt, out); }});
}

}  // namespace xraysegkit::cli
