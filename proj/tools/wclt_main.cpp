#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <string>

#include "cli/commands.hpp"
#include "cli/io.hpp"
#include "wclt/errors.hpp"
#include "wclt/version.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    int threads = 0;
    std::int64_t seed_override = -1;
    bool has_seed_override = false;
};

int dispatch(const std::string& command, const GlobalArgs& args) {
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(wclt::cli::read_file(args.config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw wclt::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (args.has_seed_override) {
        config["seed"] = static_cast<std::uint64_t>(args.seed_override);
    }

    wclt::cli::RunContext ctx;
    ctx.config = std::move(config);
    ctx.out_dir = args.out_dir;
    ctx.threads = args.threads;
    ctx.command = command;

    if (command == "simulate") {
        wclt::cli::run_simulate(ctx);
    } else if (command == "contraction") {
        wclt::cli::run_contraction(ctx);
    } else if (command == "check") {
        wclt::cli::run_check(ctx);
    } else if (command == "clt") {
        wclt::cli::run_clt(ctx);
    } else if (command == "poisson") {
        wclt::cli::run_poisson(ctx);
    } else {
        throw wclt::ConfigError("unknown command: " + command);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov-chain CLT toolkit: simulation, Wasserstein contraction "
                 "estimates, condition checks, martingale solves"};
    app.require_subcommand(1);

    GlobalArgs args;
    std::string command;
    for (const char* name : {"simulate", "contraction", "check", "clt", "poisson"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "JSON config file")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--threads", args.threads, "replicate worker threads (0 = default)");
        sub->add_option_function<std::int64_t>(
            "--seed",
            [&args](const std::int64_t& s) {
                args.seed_override = s;
                args.has_seed_override = true;
            },
            "override the config seed");
        sub->callback([&command, name]() { command = name; });
    }
    app.set_version_flag("--version", wclt::kToolVersion);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return dispatch(command, args);
    } catch (const wclt::VerdictError& e) {
        std::cerr << "verdict refused: " << e.what() << "\n";
        return 3;
    } catch (const wclt::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const wclt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
