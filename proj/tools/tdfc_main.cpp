#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tdfc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tdfc: two-delay feedback control workbench (design, certify, simulate, sweep)"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    tdfc::CommandOptions opts;
    std::string config_path, design_path;
    int steps_override = 0;
    double horizon_override = 0.0;
    unsigned seed = 0; // reserved; all computation is deterministic

    app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    auto* steps_opt =
        app.add_option("--steps-per-delay", steps_override, "override steps per delay");
    auto* horizon_opt = app.add_option("--horizon", horizon_override, "override horizon");
    app.add_option("--seed", seed, "reserved, unused")->group("");

    CLI::App* design = app.add_subcommand("design", "synthesize a gain from a config");
    design->add_option("--config", config_path, "experiment config")->required();

    CLI::App* certify = app.add_subcommand("certify", "check a design via the period map");
    certify->add_option("--design", design_path, "design file (JSON)")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "run the wait-then-control strategy");
    simulate->add_option("--config", config_path, "experiment config")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "strategy runs over a delta grid");
    sweep->add_option("--config", config_path, "experiment config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (steps_opt->count() > 0) opts.steps_per_delay = steps_override;
    if (horizon_opt->count() > 0) opts.horizon = horizon_override;

    if (design->parsed()) return tdfc::cmd_design(config_path, opts, std::cout, std::cerr);
    if (certify->parsed()) return tdfc::cmd_certify(design_path, std::cout, std::cerr);
    if (simulate->parsed()) return tdfc::cmd_simulate(config_path, opts, std::cout, std::cerr);
    if (sweep->parsed()) return tdfc::cmd_sweep(config_path, opts, std::cout, std::cerr);
    return 1;
}
