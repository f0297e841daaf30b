// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "wkelly/conditions.hpp"
#include "wkelly/error.hpp"
#include "wkelly/strategy.hpp"

using namespace wkelly;

namespace {

HistoryView empty_history()
{
    return {};
}

DiscreteMarket market(std::vector<double> e, std::vector<double> p)
{
    std::size_t const m = e.size();
    return build_discrete_market(std::move(e), std::move(p), std::vector<double>(m, 1.0), uniform_reference(m));
}

}  // namespace

TEST_CASE("constant fraction stakes")
{
    CHECK(stake(Strategy::constant_fraction(0.2), empty_history(), 100.0).stake == doctest::Approx(20.0));
    CHECK(stake(Strategy::constant_fraction(0.0), empty_history(), 37.0).stake == 0.0);
    auto const all_in = stake(Strategy::constant_fraction(1.0), empty_history(), 50.0);
    CHECK(all_in.stake == 50.0);
    CHECK_FALSE(all_in.exceeds_wealth);
    CHECK_THROWS_AS(Strategy::constant_fraction(-0.1), Error);
    CHECK_THROWS_AS(Strategy::constant_fraction(1.5), Error);
}

TEST_CASE("deposit flag")
{
    std::vector<double> const support{1.0, -1.0};
    auto const c = stake(Strategy::constant_fraction(1.0), empty_history(), 10.0, support);
    CHECK(c.stake == 10.0);
    CHECK(c.deposit_violation);
    auto const ok = stake(Strategy::constant_fraction(0.5), empty_history(), 10.0, support);
    CHECK_FALSE(ok.deposit_violation);
}

TEST_CASE("custom rules")
{
    auto const negative = Strategy::custom([](HistoryView const&, double) { return -5.0; });
    try {
        stake(negative, empty_history(), 10.0);
        FAIL("expected NegativeStake");
    } catch (Error const& e) {
        CHECK(e.code() == ErrorCode::NegativeStake);
    }
    auto const big = Strategy::custom([](HistoryView const&, double z) { return 1.5 * z; });
    auto const c = stake(big, empty_history(), 10.0, std::vector<double>{0.5, -0.5});
    CHECK(c.exceeds_wealth);
    CHECK_FALSE(c.deposit_violation);
}

TEST_CASE("constant fraction is wealth-scale equivariant")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        auto const s = Strategy::constant_fraction(u(rng));
        double const z = 0.01 + 100.0 * u(rng);
        double const c = 0.001 + 1000.0 * u(rng);
        CHECK(stake(s, empty_history(), c * z).stake == doctest::Approx(c * stake(s, empty_history(), z).stake));
    }
}

TEST_CASE("previsibility: stakes depend only on the visible prefix")
{
    auto const rule = Strategy::custom(
        [](HistoryView const& h, double z) {
            double f = 0.1;
            for (std::size_t i : h.indices) {
                f += i == 0 ? 0.05 : -0.03;
            }
            return std::clamp(f, 0.0, 0.5) * z;
        },
        "momentum");
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t const n = 1 + rng() % 6;
        std::vector<std::size_t> a(n), b(n);
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = rng() % 2;
            b[j] = j + 1 < n ? a[j] : rng() % 2;
        }
        std::vector<double> va(a.begin(), a.end()), vb(b.begin(), b.end());
        // The step-n stake sees outcomes 1..n-1 only.
        HistoryView ha{std::span(a).first(n - 1), std::span<const double>(va).first(n - 1), 1};
        HistoryView hb{std::span(b).first(n - 1), std::span<const double>(vb).first(n - 1), 1};
        CHECK(stake(rule, ha, 3.0).stake == stake(rule, hb, 3.0).stake);
    }
}

TEST_CASE("table strategy")
{
    auto const t = Strategy::table({0.1, 0.2, 0.3}, 2);
    std::vector<std::size_t> idx{1};
    std::vector<double> val{-1.0};
    CHECK(stake(t, empty_history(), 10.0).stake == doctest::Approx(1.0));
    CHECK(stake(t, HistoryView{idx, val, 1}, 10.0).stake == doctest::Approx(3.0));
    std::vector<std::size_t> idx2{1, 0};
    std::vector<double> val2{-1.0, 1.0};
    try {
        stake(t, HistoryView{idx2, val2, 1}, 10.0);
        FAIL("expected TableExhausted");
    } catch (Error const& e) {
        CHECK(e.code() == ErrorCode::TableExhausted);
    }
}

TEST_CASE("optimal strategy examples")
{
    auto const a = optimal_strategy(market({1, -1}, {0.6, 0.4}));
    REQUIRE(a.fraction().has_value());
    CHECK(*a.fraction() == *martingale_feasibility(market({1, -1}, {0.6, 0.4})).D);
    CHECK(std::abs(*a.fraction() - 0.2) <= 1e-12);

    auto const fair = optimal_strategy(market({1, -1}, {0.5, 0.5}));
    CHECK(*fair.fraction() == 0.0);

    try {
        optimal_strategy(market({1, -2}, {0.7, 0.3}));
        FAIL("expected NoMartingaleStrategy");
    } catch (Error const& e) {
        CHECK(e.code() == ErrorCode::NoMartingaleStrategy);
    }
}
