// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "../support/frozen.hpp"
#include "wkelly/cli.hpp"
#include "wkelly/json_io.hpp"

using namespace wkelly;

#ifndef WKELLY_TEST_DATA
#error "WKELLY_TEST_DATA must name the fixture directory"
#endif

namespace {

std::string data(char const* name)
{
    return std::string(WKELLY_TEST_DATA) + "/" + name;
}

struct Result {
    int status;
    json doc;
    std::string text;
};

Result run_cli(cli::RunConfig const& cfg)
{
    std::ostringstream out, err;
    int const status = cli::run(cfg, out, err);
    Result r{status, json(), out.str()};
    if (!r.text.empty() && r.text.front() == '{') {
        r.doc = json::parse(r.text);
    }
    return r;
}

cli::RunConfig config(cli::Command c, char const* market)
{
    cli::RunConfig cfg;
    cfg.command = c;
    cfg.market_path = data(market);
    return cfg;
}

}  // namespace

TEST_CASE("command names round-trip")
{
    for (auto c : {cli::Command::validate, cli::Command::drift_test, cli::Command::gaussian_return}) {
        CHECK(cli::parse_command(cli::command_name(c)) == c);
    }
    CHECK_FALSE(cli::parse_command("bogus").has_value());
}

TEST_CASE("conditions on the binary market")
{
    auto const r = run_cli(config(cli::Command::conditions, "binary.json"));
    CHECK(r.status == 0);
    CHECK(r.doc["orthogonality_residual"].get<double>() == 0.0);
    CHECK(r.doc["passed"].get<bool>());
}

TEST_CASE("feasibility on the skewed market says no")
{
    auto const r = run_cli(config(cli::Command::feasibility, "skewed.json"));
    CHECK(r.status == 1);
    CHECK_FALSE(r.doc["feasible"].get<bool>());
    CHECK(r.doc["per_outcome_D"][0].get<double>() == doctest::Approx(0.4));
    CHECK(r.doc["per_outcome_D"][1].get<double>() == doctest::Approx(0.2));

    auto const o = run_cli(config(cli::Command::optimal, "skewed.json"));
    CHECK(o.status == 1);
    CHECK(o.doc["error"]["name"] == "NoMartingaleStrategy");
}

TEST_CASE("gaussian alpha")
{
    auto const r = run_cli(config(cli::Command::alpha, "gauss.json"));
    CHECK(r.status == 0);
    CHECK(std::abs(r.doc["alpha"]["value"].get<double>() - frozen::kl_gauss_1d) <= 1e-12);
}

TEST_CASE("usage errors")
{
    cli::RunConfig cfg = config(cli::Command::exact, "binary.json");
    CHECK(run_cli(cfg).status == 2);
    cfg.fraction = 0.2;
    cfg.n = 0;
    CHECK(run_cli(cfg).status == 2);
    cfg.n = 3;
    cfg.z0 = -1.0;
    CHECK(run_cli(cfg).status == 2);
    CHECK(run_cli(config(cli::Command::gaussian_return, "binary.json")).status == 2);
    auto csv = config(cli::Command::alpha, "binary.json");
    csv.format = cli::Format::csv;
    CHECK(run_cli(csv).status == 2);
}

TEST_CASE("module errors keep their names")
{
    auto bad = config(cli::Command::validate, "missing.json");
    auto const r = run_cli(bad);
    CHECK(r.status == 1);
    CHECK(r.doc.contains("error"));

    auto ruin = config(cli::Command::exact, "binary.json");
    ruin.fraction = 1.0;
    ruin.n = 2;
    auto const q = run_cli(ruin);
    CHECK(q.status == 1);
    CHECK(q.doc["error"]["name"] == "RuinViolation");
    CHECK(q.doc["error"]["step"] == 1);
}

TEST_CASE("exact, sweep and trajectory outputs")
{
    auto ex = config(cli::Command::exact, "binary.json");
    ex.strategy_path = data("strategy_d02.json");
    ex.n = 5;
    auto const e = run_cli(ex);
    CHECK(e.status == 0);
    CHECK(std::abs(e.doc["expected_rate"].get<double>() - frozen::exact_d02_n5) <= 1e-14);

    auto sw = config(cli::Command::sweep, "binary.json");
    sw.d_step = 0.01;
    auto const s = run_cli(sw);
    CHECK(s.status == 0);
    CHECK(s.doc["argmax"]["D"].get<double>() == 0.2);
    CHECK(s.doc["skipped_inadmissible"].get<int>() == 1);
    sw.format = cli::Format::csv;
    CHECK(run_cli(sw).text.rfind("D,expected_rate,gap\n", 0) == 0);

    auto tr = config(cli::Command::trajectory, "binary.json");
    tr.fraction = 0.2;
    tr.sequence = {0, 1};
    tr.format = cli::Format::csv;
    auto const t = run_cli(tr);
    CHECK(t.status == 0);
    CHECK(t.text.find("2,-1,0.95999999999999996") != std::string::npos);
}

TEST_CASE("simulate and drift-test")
{
    auto sim = config(cli::Command::simulate, "binary.json");
    sim.fraction = 0.2;
    sim.n = 10;
    sim.paths = 20'000;
    sim.seed = 9;
    sim.threads = 1;
    auto const a = run_cli(sim);
    sim.threads = 3;
    auto const b = run_cli(sim);
    CHECK(a.status == 0);
    CHECK(a.text == b.text);

    auto drift = config(cli::Command::drift_test, "binary.json");
    drift.fraction = 0.2;
    drift.n = 3;
    drift.paths = 50'000;
    auto const d = run_cli(drift);
    CHECK(d.status == 0);
    CHECK(d.doc["supermartingale_consistent"].get<bool>());
}

TEST_CASE("gaussian return evaluation")
{
    auto cfg = config(cli::Command::gaussian_return, "gauss.json");
    cfg.fraction = 0.5;
    cfg.points = {-3.0, 0.0, 3.0};
    auto const r = run_cli(cfg);
    CHECK(r.status == 0);
    CHECK(r.doc["positive"].get<bool>());
    CHECK(r.doc["points"][1]["one_plus_D_g"].get<double>() == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(r.doc["points"][0]["density_residual"].get<double>()) <= 1e-15);
}
