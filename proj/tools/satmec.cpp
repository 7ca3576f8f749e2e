#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "satmec/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Integrated satellite-MEC network simulator"};
    app.require_subcommand(1);

    satmec::RunConfig cfg;
    std::uint64_t seed = 0;
    std::size_t trials = 0;

    auto* validate = app.add_subcommand("validate", "Parse a scenario and check its network");
    auto* case_study = app.add_subcommand("case-study", "Compare offloading schemes on the case study");
    auto* orchestrate = app.add_subcommand("orchestrate", "Run per-period on-demand orchestration");
    auto* placement = app.add_subcommand("placement", "Choose on-orbit server placement");

    for (auto* sub : {validate, case_study, orchestrate, placement})
        sub->add_option("--scenario", cfg.scenario, "Scenario file (YAML)")->required();
    for (auto* sub : {case_study, orchestrate, placement})
        sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    auto* seed_opt = case_study->add_option("--seed", seed, "Master seed for fading draws");
    auto* trials_opt = case_study->add_option("--trials", trials, "Monte Carlo trials (0: predicted only)");
    case_study->add_option("--method", cfg.method, "exact, alternating or all")
        ->check(CLI::IsMember({"exact", "alternating", "all"}));
    placement->add_option("--method", cfg.method, "exhaustive, greedy or both")
        ->check(CLI::IsMember({"exhaustive", "greedy", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : satmec::kExitIo;
    }
    if (*seed_opt) cfg.seed = seed;
    if (*trials_opt) cfg.trials = trials;
    cfg.command = app.get_subcommands().front()->get_name();
    return satmec::run_command(cfg, std::cout, std::cerr);
}
