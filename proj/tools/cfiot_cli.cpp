#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "cfiot/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cell-free IoT activity-detection experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int trials = 0;
    bool seed_set = false;
    bool trials_set = false;

    auto add_common = [&](CLI::App* sub, const std::string& default_out) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_path, "output path")
            ->default_val(default_out);
        sub->add_option("--seed", seed, "master seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--trials", trials,
                        "trial/realization count override")
            ->each([&](const std::string&) { trials_set = true; });
    };

    std::vector<CLI::App*> figure_subs;
    for (const std::string name : {"fig2", "fig3", "fig4", "fig5", "fig6",
                                   "fig7"}) {
        auto* sub = app.add_subcommand(
            name, "write the " + name + " sweep as CSV");
        add_common(sub, name + ".csv");
        figure_subs.push_back(sub);
    }
    auto* coverage = app.add_subcommand(
        "coverage", "coverage table at the configured antenna count");
    add_common(coverage, "coverage.csv");
    auto* selftest = app.add_subcommand(
        "selftest", "small deterministic run for reproducibility checks");
    add_common(selftest, "selftest_out");

    CLI11_PARSE(app, argc, argv);

    try {
        cfiot::experiments::CliOverrides overrides;
        if (seed_set) overrides.seed = seed;
        if (trials_set) overrides.trials = trials;
        const auto cfg =
            cfiot::experiments::resolve_config(config_path, overrides);
        std::cerr << "rho=" << cfg.rho() << " energy=" << cfg.energy()
                  << " seed=" << cfg.master_seed << "\n";
        const auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "coverage") {
            cfiot::experiments::run_coverage(cfg, out_path);
        } else if (name == "selftest") {
            cfiot::experiments::run_selftest(cfg, out_path);
        } else {
            cfiot::experiments::run_figure(name, cfg, out_path);
        }
        std::cerr << "wrote " << out_path << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
