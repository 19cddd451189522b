#include "impulsive/app.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    using namespace impulsive::app;

    CLI::App cli{"Impulsive nonautonomous evolution equations: simulation and bound certificates"};
    cli.require_subcommand(1);

    RunOptions opt;
    if (const char* env = std::getenv("IMPULSIVE_OUT_DIR")) opt.out_dir = env;
    std::string out_dir;
    std::uint64_t seed = 0;
    cli.add_option("--out-dir", out_dir, "Output directory (default $IMPULSIVE_OUT_DIR or .)");
    auto* seed_opt = cli.add_option("--seed", seed, "Override [problem].seed");
    cli.add_option("--threads", opt.threads, "OpenMP thread count (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);

    std::string config;
    auto add = [&](const char* name, const char* help) {
        auto* sub = cli.add_subcommand(name, help);
        sub->add_option("config", config, "Scenario file")->required();
        return sub;
    };
    auto* simulate = add("simulate", "Integrate and write trajectory.csv and run.json");
    auto* verify = add("verify", "Run the enabled certificates and write reports.json and bounds.csv");
    auto* constants = add("constants", "Estimate constants and write constants.json");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (seed_opt->count() > 0) opt.seed = seed;

    if (simulate->parsed()) return cmd_simulate(config, opt, std::cerr);
    if (verify->parsed()) return cmd_verify(config, opt, std::cerr);
    if (constants->parsed()) return cmd_constants(config, opt, std::cerr);
    return exit_config_error;
}
