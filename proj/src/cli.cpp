// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/cli.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "wkelly/error.hpp"
#include "wkelly/json_io.hpp"

namespace wkelly::cli {

namespace {

constexpr char const* schema_hint =
    "market and strategy files follow docs/schemas/market.schema.json and docs/schemas/strategy.schema.json\n";

constexpr std::array<std::pair<Command, std::string_view>, 11> command_names{{
    {Command::validate, "validate"},
    {Command::conditions, "conditions"},
    {Command::alpha, "alpha"},
    {Command::feasibility, "feasibility"},
    {Command::optimal, "optimal"},
    {Command::exact, "exact"},
    {Command::sweep, "sweep"},
    {Command::simulate, "simulate"},
    {Command::drift_test, "drift-test"},
    {Command::gaussian_return, "gaussian-return"},
    {Command::trajectory, "trajectory"},
}};

/// Supermartingale drift above this many standard errors fails drift-test.
constexpr double drift_z_limit = 4.0;

struct Outcome {
    json doc;
    int status = exit_ok;
    std::string csv;  ///< used instead of doc when non-empty
};

GridSpec effective_grid(RunConfig const& cfg, GridSpec spec)
{
    if (cfg.grid_nodes) {
        spec.nodes = *cfg.grid_nodes;
    }
    if (cfg.grid_radius) {
        spec.radius = *cfg.grid_radius;
    }
    if (cfg.grid_scheme) {
        if (*cfg.grid_scheme == "tensor") {
            spec.scheme = QuadratureScheme::tensor;
        } else if (*cfg.grid_scheme == "gaussian") {
            spec.scheme = QuadratureScheme::gaussian;
        } else {
            throw UsageError("--scheme must be tensor or gaussian");
        }
    }
    validate(spec);
    return spec;
}

Strategy load_strategy(RunConfig const& cfg, std::size_t branching)
{
    if (cfg.fraction && !cfg.strategy_path.empty()) {
        throw UsageError("give either --strategy or --D, not both");
    }
    if (cfg.fraction) {
        return Strategy::constant_fraction(*cfg.fraction);
    }
    if (cfg.strategy_path.empty()) {
        throw UsageError("this command needs --strategy FILE or --D VALUE");
    }
    return strategy_from_json(read_json_file(cfg.strategy_path), branching);
}

DiscreteMarket const& require_discrete(AnyMarket const& m, Command c)
{
    if (auto const* d = std::get_if<DiscreteMarket>(&m)) {
        return *d;
    }
    throw UsageError(std::string(command_name(c)) + " needs a discrete market");
}

GaussianMarket const& require_gaussian(AnyMarket const& m, Command c)
{
    if (auto const* g = std::get_if<GaussianMarket>(&m)) {
        return *g;
    }
    throw UsageError(std::string(command_name(c)) + " needs a gaussian market");
}

SimulationOptions sim_options(RunConfig const& cfg)
{
    SimulationOptions o;
    o.threads = cfg.threads;
    o.ruin = cfg.skip_ruin ? RuinPolicy::skip : RuinPolicy::error;
    return o;
}

void require_steps(RunConfig const& cfg)
{
    if (cfg.n < 1) {
        throw UsageError("--n must be at least 1");
    }
    if (!(cfg.z0 > 0.0)) {
        throw UsageError("--z0 must be positive");
    }
}

Outcome run_validate(LoadedMarket const& loaded)
{
    Outcome o;
    if (auto const* d = std::get_if<DiscreteMarket>(&loaded.market)) {
        auto const residuals = validate(*d);
        json list = json::array();
        for (auto const& r : residuals) {
            list.push_back({{"invariant", r.invariant}, {"residual", number(r.residual)}});
        }
        o.doc = {{"valid", residuals.empty()},
                 {"type", "discrete"},
                 {"m", d->size()},
                 {"uniform_reference", d->has_uniform_reference()},
                 {"residuals", list},
                 {"market", to_json(*d)}};
        o.status = residuals.empty() ? exit_ok : exit_rejected;
        return o;
    }
    auto const& g = std::get<GaussianMarket>(loaded.market);
    o.doc = {{"valid", true},
             {"type", "gaussian"},
             {"dim", g.dim()},
             {"weight", g.weight().label()},
             {"return", g.returns().label()},
             {"grid", to_json(loaded.grid)}};
    return o;
}

Outcome run_conditions(RunConfig const& cfg, LoadedMarket const& loaded)
{
    ConditionReport report;
    if (auto const* d = std::get_if<DiscreteMarket>(&loaded.market)) {
        report = condition_report(*d);
    } else {
        report = condition_report(std::get<GaussianMarket>(loaded.market), effective_grid(cfg, loaded.grid));
    }
    return {to_json(report), report.passed() ? exit_ok : exit_rejected, {}};
}

Outcome run_alpha(RunConfig const& cfg, LoadedMarket const& loaded)
{
    AlphaValue a;
    if (auto const* d = std::get_if<DiscreteMarket>(&loaded.market)) {
        a = alpha_discrete(*d);
    } else {
        a = alpha_gaussian(std::get<GaussianMarket>(loaded.market), effective_grid(cfg, loaded.grid),
                           cfg.force_quadrature);
    }
    return {{{"alpha", to_json(a)}}, exit_ok, {}};
}

FeasibilityResult feasibility_of(RunConfig const& cfg, LoadedMarket const& loaded)
{
    if (auto const* d = std::get_if<DiscreteMarket>(&loaded.market)) {
        return martingale_feasibility(*d);
    }
    return martingale_feasibility_grid(
        discretize_gaussian_market(std::get<GaussianMarket>(loaded.market), effective_grid(cfg, loaded.grid)));
}

Outcome run_feasibility(RunConfig const& cfg, LoadedMarket const& loaded)
{
    auto const r = feasibility_of(cfg, loaded);
    return {to_json(r), r.feasible ? exit_ok : exit_rejected, {}};
}

Outcome run_optimal(RunConfig const& cfg, LoadedMarket const& loaded)
{
    auto const r = feasibility_of(cfg, loaded);
    if (!r.feasible) {
        throw Error(ErrorCode::NoMartingaleStrategy, r.reason);
    }
    return {{{"strategy", to_json(Strategy::constant_fraction(*r.D))}}, exit_ok, {}};
}

Outcome run_exact(RunConfig const& cfg, LoadedMarket const& loaded)
{
    require_steps(cfg);
    auto const& market = require_discrete(loaded.market, cfg.command);
    auto const strategy = load_strategy(cfg, market.size());
    ExactOptions opts;
    opts.record_drifts = cfg.record_drifts;
    return {to_json(exact_expected_rate(market, strategy, cfg.n, cfg.z0, opts)), exit_ok, {}};
}

Outcome run_sweep(RunConfig const& cfg, LoadedMarket const& loaded)
{
    require_steps(cfg);
    auto const& market = require_discrete(loaded.market, cfg.command);
    std::vector<double> grid;
    std::size_t skipped = 0;
    for (double d : fraction_grid(cfg.d_min, cfg.d_max, cfg.d_step)) {
        bool admissible = d >= 0.0 && d <= 1.0;
        for (double e : market.outcomes()) {
            admissible = admissible && 1.0 + d * e > 0.0;
        }
        if (admissible) {
            grid.push_back(d);
        } else {
            ++skipped;
        }
    }
    if (grid.empty()) {
        throw UsageError("no admissible fraction in the sweep range");
    }
    auto const sweep = sweep_fraction(market, grid, cfg.n, cfg.z0);
    Outcome o;
    if (cfg.format == Format::csv) {
        std::ostringstream os;
        write_csv(os, sweep);
        o.csv = os.str();
        return o;
    }
    auto const best = sweep_argmax(sweep);
    o.doc = {{"n", cfg.n},
             {"skipped_inadmissible", skipped},
             {"argmax", {{"D", best.D}, {"expected_rate", number(best.expected_rate)}, {"gap", number(best.gap)}}},
             {"points", to_json(std::span<const SweepPoint>(sweep))}};
    return o;
}

Outcome run_simulate(RunConfig const& cfg, LoadedMarket const& loaded)
{
    require_steps(cfg);
    if (cfg.paths < 1) {
        throw UsageError("--paths must be at least 1");
    }
    SimulationReport report;
    if (auto const* d = std::get_if<DiscreteMarket>(&loaded.market)) {
        auto const strategy = load_strategy(cfg, d->size());
        report = simulate(*d, strategy, cfg.n, cfg.paths, cfg.seed, cfg.z0, sim_options(cfg));
        if (!cfg.dump_paths.empty()) {
            std::ofstream dump_file(cfg.dump_paths);
            if (!dump_file) {
                throw Error(ErrorCode::InvalidArgument, "cannot write " + cfg.dump_paths);
            }
            write_paths_csv(dump_file, *d, strategy, cfg.n, cfg.paths, cfg.seed, cfg.z0);
        }
    } else {
        auto const& g = std::get<GaussianMarket>(loaded.market);
        if (!cfg.dump_paths.empty()) {
            throw UsageError("--dump-paths supports discrete markets only");
        }
        auto const strategy = load_strategy(cfg, 0);
        auto const alpha = alpha_gaussian(g, effective_grid(cfg, loaded.grid));
        report = simulate(g, strategy, alpha, cfg.n, cfg.paths, cfg.seed, cfg.z0, sim_options(cfg));
    }
    return {to_json(report), exit_ok, {}};
}

Outcome run_drift_test(RunConfig const& cfg, LoadedMarket const& loaded)
{
    require_steps(cfg);
    if (cfg.paths < 1) {
        throw UsageError("--paths must be at least 1");
    }
    DriftReport report;
    if (auto const* d = std::get_if<DiscreteMarket>(&loaded.market)) {
        report = drift_test(*d, load_strategy(cfg, d->size()), cfg.n, cfg.paths, cfg.seed, cfg.z0, sim_options(cfg));
    } else {
        auto const& g = std::get<GaussianMarket>(loaded.market);
        auto const alpha = alpha_gaussian(g, effective_grid(cfg, loaded.grid));
        report = drift_test(g, load_strategy(cfg, 0), alpha, cfg.n, cfg.paths, cfg.seed, cfg.z0, sim_options(cfg));
    }
    bool supermartingale = true;
    for (auto const& s : report.steps) {
        supermartingale = supermartingale && !(s.z_score > drift_z_limit);
    }
    json doc = to_json(report);
    doc["z_limit"] = drift_z_limit;
    doc["supermartingale_consistent"] = supermartingale;
    return {doc, supermartingale ? exit_ok : exit_rejected, {}};
}

Outcome run_gaussian_return(RunConfig const& cfg, LoadedMarket const& loaded)
{
    auto const& market = require_gaussian(loaded.market, cfg.command);
    if (!cfg.fraction) {
        throw UsageError("gaussian-return needs --D");
    }
    double const d = *cfg.fraction;
    auto const g = construct_return_gaussian(market.sigma(), market.sigma0(), d);
    std::vector<double> points = cfg.points;
    if (points.empty()) {
        points = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
    }
    std::size_t const dim = market.dim();
    if (points.size() % dim != 0) {
        throw UsageError("--points must hold a multiple of the market dimension");
    }
    json rows = json::array();
    bool positive = true;
    for (std::size_t k = 0; k < points.size(); k += dim) {
        Point x = Eigen::Map<const Eigen::VectorXd>(points.data() + k, static_cast<Eigen::Index>(dim));
        double const gx = g(x);
        double const factor = 1.0 + d * gx;
        double const residual = market.density(x) - market.reference(x) * factor;
        positive = positive && factor > 0.0;
        rows.push_back({{"x", std::vector<double>(x.data(), x.data() + x.size())},
                        {"g", number(gx)},
                        {"one_plus_D_g", number(factor)},
                        {"density_residual", number(residual)}});
    }
    return {{{"D", d}, {"return", g.label()}, {"positive", positive}, {"points", rows}},
            positive ? exit_ok : exit_rejected,
            {}};
}

Outcome run_trajectory_cmd(RunConfig const& cfg, LoadedMarket const& loaded)
{
    auto const& market = require_discrete(loaded.market, cfg.command);
    if (cfg.sequence.empty()) {
        throw UsageError("trajectory needs --sequence");
    }
    if (!(cfg.z0 > 0.0)) {
        throw UsageError("--z0 must be positive");
    }
    auto const t = run_trajectory(market, load_strategy(cfg, market.size()), cfg.sequence, cfg.z0);
    Outcome o;
    if (cfg.format == Format::csv) {
        std::ostringstream os;
        write_csv(os, t);
        o.csv = os.str();
    } else {
        o.doc = to_json(t);
    }
    return o;
}

Outcome dispatch(RunConfig const& cfg)
{
    if (cfg.market_path.empty()) {
        throw UsageError("--market is required");
    }
    if (cfg.format == Format::csv && cfg.command != Command::sweep && cfg.command != Command::trajectory) {
        throw UsageError("csv output is available for sweep and trajectory only");
    }
    LoadedMarket const loaded = load_market(cfg.market_path);
    switch (cfg.command) {
    case Command::validate: return run_validate(loaded);
    case Command::conditions: return run_conditions(cfg, loaded);
    case Command::alpha: return run_alpha(cfg, loaded);
    case Command::feasibility: return run_feasibility(cfg, loaded);
    case Command::optimal: return run_optimal(cfg, loaded);
    case Command::exact: return run_exact(cfg, loaded);
    case Command::sweep: return run_sweep(cfg, loaded);
    case Command::simulate: return run_simulate(cfg, loaded);
    case Command::drift_test: return run_drift_test(cfg, loaded);
    case Command::gaussian_return: return run_gaussian_return(cfg, loaded);
    case Command::trajectory: return run_trajectory_cmd(cfg, loaded);
    }
    throw UsageError("unknown command");
}

void emit(RunConfig const& cfg, std::string const& text, std::ostream& out)
{
    if (cfg.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!file) {
        throw UsageError("cannot write " + cfg.output_path);
    }
    file << text;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name)
{
    for (auto const& [c, n] : command_names) {
        if (n == name) {
            return c;
        }
    }
    return std::nullopt;
}

std::string_view command_name(Command c) noexcept
{
    for (auto const& [cmd, n] : command_names) {
        if (cmd == c) {
            return n;
        }
    }
    return "unknown";
}

int run(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    Outcome result;
    try {
        result = dispatch(cfg);
    } catch (UsageError const& e) {
        err << "usage error: " << e.what() << "\n" << schema_hint;
        return exit_usage;
    } catch (Error const& e) {
        result.doc = {{"command", std::string(command_name(cfg.command))},
                      {"error", {{"name", std::string(e.name())}, {"message", e.detail()}}}};
        if (auto const* ruin = dynamic_cast<RuinError const*>(&e)) {
            result.doc["error"]["step"] = ruin->step();
        }
        result.status = exit_rejected;
        result.csv.clear();
        err << e.what() << "\n";
    }
    try {
        if (!result.csv.empty()) {
            emit(cfg, result.csv, out);
        } else {
            if (result.status == exit_ok || !result.doc.contains("command")) {
                result.doc["command"] = std::string(command_name(cfg.command));
            }
            emit(cfg, dump(result.doc), out);
        }
    } catch (UsageError const& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }
    return result.status;
}

}  // namespace wkelly::cli
