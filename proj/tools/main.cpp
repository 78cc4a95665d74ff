// bfeopt: benchmark CLI for the forward-exploration learning-rate schedulers.
//
// Subcommands: run, histogram, landscape, sweep.
// Exit codes: 0 success, 1 config/usage error, 2 run failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bfeopt/harness.hpp"

namespace {

struct ConfigArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    std::string out_dir;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* steps_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    args.seed_opt = cmd->add_option("--seed", args.seed, "Override the config seed");
    args.steps_opt =
        cmd->add_option("--max-steps", args.max_steps, "Override the config step budget");
    args.out_opt = cmd->add_option("--out", args.out_dir, "Override the config output directory");
}

bfeopt::CliOverrides overrides_from(const ConfigArgs& args) {
    bfeopt::CliOverrides ov;
    if (args.seed_opt->count() > 0) ov.seed = args.seed;
    if (args.steps_opt->count() > 0) ov.max_steps = static_cast<std::size_t>(args.max_steps);
    if (args.out_opt->count() > 0) ov.out_dir = args.out_dir;
    return ov;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for forward-exploration learning-rate schedulers"};
    app.require_subcommand(1);

    ConfigArgs run_args;
    CLI::App* run_cmd = app.add_subcommand("run", "Run optimizers and write trace CSVs + charts");
    add_config_options(run_cmd, run_args);

    std::vector<std::string> histogram_files;
    std::string histogram_out = "out";
    CLI::App* histogram_cmd =
        app.add_subcommand("histogram", "Aggregate inner-loop counts from trace CSVs");
    histogram_cmd->add_option("files", histogram_files, "Trace CSV files")->required();
    histogram_cmd->add_option("--out", histogram_out, "Output directory");

    ConfigArgs landscape_args;
    CLI::App* landscape_cmd = app.add_subcommand(
        "landscape", "Render 2D trajectories over the loss landscape");
    add_config_options(landscape_cmd, landscape_args);

    ConfigArgs sweep_args;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run the tolerance-rule grid and write a summary CSV");
    add_config_options(sweep_cmd, sweep_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run_cmd->parsed()) {
            return bfeopt::cmd_run(
                bfeopt::load_config(run_args.config_path, overrides_from(run_args)));
        }
        if (histogram_cmd->parsed()) {
            return bfeopt::cmd_histogram(histogram_files, histogram_out);
        }
        if (landscape_cmd->parsed()) {
            return bfeopt::cmd_landscape(
                bfeopt::load_config(landscape_args.config_path, overrides_from(landscape_args)));
        }
        if (sweep_cmd->parsed()) {
            return bfeopt::cmd_sweep(
                bfeopt::load_config(sweep_args.config_path, overrides_from(sweep_args)));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
