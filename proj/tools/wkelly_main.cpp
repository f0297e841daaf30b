// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wkelly/cli.hpp"

namespace {

void add_common(CLI::App* sub, wkelly::cli::RunConfig& cfg)
{
    sub->add_option("--market", cfg.market_path, "market JSON file")->required();
    sub->add_option("-o,--output", cfg.output_path, "write results here instead of stdout");
}

void add_grid(CLI::App* sub, wkelly::cli::RunConfig& cfg)
{
    sub->add_option("--K", cfg.grid_nodes, "quadrature nodes per axis");
    sub->add_option("--R", cfg.grid_radius, "box half-width in standard deviations");
    sub->add_option("--scheme", cfg.grid_scheme, "tensor or gaussian");
}

void add_strategy(CLI::App* sub, wkelly::cli::RunConfig& cfg)
{
    sub->add_option("--strategy", cfg.strategy_path, "strategy JSON file");
    sub->add_option("--D", cfg.fraction, "constant fraction strategy");
    sub->add_option("--z0", cfg.z0, "initial wealth");
}

void add_sim(CLI::App* sub, wkelly::cli::RunConfig& cfg)
{
    sub->add_option("--n", cfg.n, "number of steps");
    sub->add_option("--paths", cfg.paths, "number of simulated paths");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads, "worker threads (0: auto)");
    sub->add_flag("--skip-ruin", cfg.skip_ruin, "drop ruined paths instead of failing");
}

}  // namespace

int main(int argc, char** argv)
{
    using wkelly::cli::Command;
    wkelly::cli::RunConfig cfg;
    std::string format = "json";

    CLI::App app{"Weighted log-optimal investment engine"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "check market invariants");
    add_common(validate, cfg);

    auto* conditions = app.add_subcommand("conditions", "orthogonality and reference-mass conditions");
    add_common(conditions, cfg);
    add_grid(conditions, cfg);

    auto* alpha = app.add_subcommand("alpha", "optimal weighted growth rate");
    add_common(alpha, cfg);
    add_grid(alpha, cfg);
    alpha->add_flag("--force-quadrature", cfg.force_quadrature, "skip the closed form");

    auto* feasibility = app.add_subcommand("feasibility", "constant-fraction martingale feasibility");
    add_common(feasibility, cfg);
    add_grid(feasibility, cfg);

    auto* optimal = app.add_subcommand("optimal", "emit the optimal constant-fraction strategy");
    add_common(optimal, cfg);
    add_grid(optimal, cfg);

    auto* exact = app.add_subcommand("exact", "expected rate by full enumeration");
    add_common(exact, cfg);
    add_strategy(exact, cfg);
    exact->add_option("--n", cfg.n, "number of steps");
    exact->add_flag("--drifts", cfg.record_drifts, "record the conditional drift at every node");

    auto* sweep = app.add_subcommand("sweep", "expected rate over a range of fractions");
    add_common(sweep, cfg);
    sweep->add_option("--n", cfg.n, "number of steps");
    sweep->add_option("--z0", cfg.z0, "initial wealth");
    sweep->add_option("--D-min", cfg.d_min);
    sweep->add_option("--D-max", cfg.d_max);
    sweep->add_option("--D-step", cfg.d_step);
    sweep->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the expected rate");
    add_common(simulate, cfg);
    add_grid(simulate, cfg);
    add_strategy(simulate, cfg);
    add_sim(simulate, cfg);
    simulate->add_option("--dump-paths", cfg.dump_paths, "CSV file for per-path wealth and rate");

    auto* drift = app.add_subcommand("drift-test", "per-step supermartingale drift check");
    add_common(drift, cfg);
    add_grid(drift, cfg);
    add_strategy(drift, cfg);
    add_sim(drift, cfg);

    auto* gret = app.add_subcommand("gaussian-return", "evaluate the martingale return function");
    add_common(gret, cfg);
    gret->add_option("--D", cfg.fraction, "fraction in (0,1)")->required();
    gret->add_option("--points", cfg.points, "flattened evaluation points");

    auto* traj = app.add_subcommand("trajectory", "wealth and rate along one outcome sequence");
    add_common(traj, cfg);
    add_strategy(traj, cfg);
    traj->add_option("--sequence", cfg.sequence, "0-based outcome indices")->required();
    traj->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : wkelly::cli::exit_usage;
    }

    for (auto* sub : app.get_subcommands()) {
        cfg.command = *wkelly::cli::parse_command(sub->get_name());
    }
    cfg.format = format == "csv" ? wkelly::cli::Format::csv : wkelly::cli::Format::json;
    return wkelly::cli::run(cfg, std::cout, std::cerr);
}
