// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <random>
#include <sstream>

#include "../support/frozen.hpp"
#include "wkelly/conditions.hpp"
#include "wkelly/engine.hpp"
#include "wkelly/error.hpp"
#include "wkelly/quadrature.hpp"

using namespace wkelly;

namespace {

Eigen::MatrixXd mat1(double v)
{
    return Eigen::MatrixXd::Constant(1, 1, v);
}

DiscreteMarket binary()
{
    return build_discrete_market({1, -1}, {0.6, 0.4}, {1, 1}, {0.5, 0.5});
}

GaussianMarket kl_market(PointFunction weight = PointFunction::constant(1.0))
{
    return build_gaussian_market(1, mat1(1.0), mat1(2.0), std::move(weight),
                                 construct_return_gaussian(mat1(1.0), mat1(2.0), 0.5));
}

}  // namespace

TEST_CASE("wealth step")
{
    CHECK(wealth_step(100.0, 20.0, 1.0) == doctest::Approx(120.0));
    CHECK(wealth_step(100.0, 20.0, -1.0) == doctest::Approx(80.0));
    try {
        wealth_step(100.0, 100.0, -1.0, 3);
        FAIL("expected RuinViolation");
    } catch (RuinError const& e) {
        CHECK(e.code() == ErrorCode::RuinViolation);
        CHECK(e.step() == 3);
    }
}

TEST_CASE("rate increment")
{
    CHECK(rate_increment(1.0, 120.0, 100.0) == doctest::Approx(frozen::ln_1_2).epsilon(1e-15));
    CHECK(rate_increment(0.0, 5.0, 100.0) == 0.0);
    CHECK(rate_increment(2.0, 80.0, 100.0) == doctest::Approx(frozen::two_ln_0_8).epsilon(1e-15));
}

TEST_CASE("discrete alpha")
{
    CHECK(std::abs(alpha_discrete(binary()).value - frozen::alpha_binary) <= 1e-15);
    for (std::size_t m : {2u, 3u, 5u, 8u}) {
        auto const mk = build_discrete_market(std::vector<double>(m, 0.0), uniform_reference(m),
                                              std::vector<double>(m, 1.0), uniform_reference(m));
        CHECK(alpha_discrete(mk).value == 0.0);
    }
    auto const three = build_discrete_market({2, -1, -1}, {0.4, 0.3, 0.3}, {1, 1, 1}, uniform_reference(3));
    CHECK(std::abs(alpha_discrete(three).value - frozen::alpha_three) <= 1e-15);
    auto const weighted = build_discrete_market({1, -2}, {0.7, 0.3}, {2, 1}, {0.5, 0.5});
    CHECK(std::abs(alpha_discrete(weighted).value - frozen::alpha_weighted_skew) <= 1e-15);
}

TEST_CASE("discrete alpha with a general reference")
{
    auto const mk = build_discrete_market({1, -1, 2}, {0.5, 0.3, 0.2}, {1.0, 0.5, 2.0}, {0.2, 0.3, 0.9});
    double expect = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        expect += mk.weights()[i] * mk.probs()[i] * std::log(mk.probs()[i] / mk.reference()[i]);
    }
    CHECK(alpha_discrete(mk).value == doctest::Approx(expect).epsilon(1e-15));
    CHECK(alpha_general(as_grid(mk)).value == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("alpha is a KL divergence for unit weights")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t const m = 2 + trial % 7;
        std::vector<double> p(m);
        double total = 0.0;
        for (auto& x : p) {
            x = u(rng);
            total += x;
        }
        for (auto& x : p) {
            x /= total;
        }
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            s += p[i];
        }
        p.back() = 1.0 - s;
        std::vector<double> e(m);
        for (std::size_t i = 0; i < m; ++i) {
            e[i] = static_cast<double>(i) - 1.0;
        }
        auto const mk = build_discrete_market(e, p, std::vector<double>(m, 1.0), uniform_reference(m));
        CHECK(alpha_discrete(mk).value >= 0.0);
    }
}

TEST_CASE("one-step martingale identity")
{
    for (auto const& mk : {binary(), build_discrete_market({2, -1, -1}, {0.4, 0.3, 0.3}, {1, 1, 1},
                                                           uniform_reference(3))}) {
        double const d = *martingale_feasibility(mk).D;
        double sum = 0.0;
        for (std::size_t i = 0; i < mk.size(); ++i) {
            sum += mk.probs()[i] * mk.weights()[i] * std::log1p(d * mk.outcomes()[i]);
        }
        CHECK(std::abs(sum - alpha_discrete(mk).value) <= 1e-12);
    }
}

TEST_CASE("grid alpha")
{
    Eigen::MatrixXd pts(1, 2);
    pts << 0.0, 1.0;
    auto const same = build_grid_market(pts, {1, 1}, {0.3, 0.7}, {0.3, 0.7}, {1, 1}, {1, -1});
    CHECK(alpha_general(same).value == 0.0);

    auto const a = alpha_general(kl_market(), GridSpec{});
    CHECK(std::abs(a.value - frozen::kl_gauss_1d) <= 1e-8);

    auto const indicator = PointFunction([](Point const& x) { return x[0] > 0.0 ? 1.0 : 0.0; }, "x>0");
    GridSpec spec;
    spec.nodes = 64;
    auto const half = alpha_general(kl_market(indicator), spec);
    CHECK(std::abs(half.value - frozen::kl_gauss_half) <= 1e-8);
}

TEST_CASE("gaussian alpha")
{
    auto const closed = alpha_gaussian(kl_market());
    CHECK(closed.method == AlphaMethod::closed_form);
    CHECK(std::abs(closed.value - frozen::kl_gauss_1d) <= 1e-15);
    auto const quad = alpha_gaussian(kl_market(), {}, true);
    CHECK(quad.method == AlphaMethod::quadrature);
    CHECK(std::abs(quad.value - frozen::kl_gauss_1d) <= 1e-8);

    Eigen::MatrixXd const i2 = Eigen::MatrixXd::Identity(2, 2);
    auto const gm2 = build_gaussian_market(2, i2, 2.0 * i2, PointFunction::constant(1.0),
                                           construct_return_gaussian(i2, 2.0 * i2, 0.5));
    CHECK(std::abs(alpha_gaussian(gm2).value - frozen::kl_gauss_2d) <= 1e-15);
    CHECK(std::abs(alpha_gaussian(gm2, {}, true).value - frozen::kl_gauss_2d) <= 1e-8);

    // Near-equal covariances: the integrand vanishes.
    auto const near = build_gaussian_market(1, mat1(1.0), mat1(1.0 + 1e-9), PointFunction::constant(1.0),
                                            PointFunction::constant(0.0));
    CHECK(std::abs(alpha_gaussian(near).value) <= 1e-15);
}

TEST_CASE("gaussian alpha with a correlated covariance")
{
    Eigen::MatrixXd s(2, 2), s0(2, 2);
    s << 1.0, 0.4, 0.4, 1.5;
    s0 << 2.0, -0.2, -0.2, 1.0;
    auto const gm = build_gaussian_market(2, s, s0, PointFunction::constant(1.0), PointFunction::constant(0.0));
    double const expect = 0.5 * ((s0.inverse() * s).trace() - 2.0 + std::log(s0.determinant() / s.determinant()));
    CHECK(alpha_gaussian(gm).value == doctest::Approx(expect).epsilon(1e-14));
    CHECK(std::abs(alpha_gaussian(gm, {}, true).value - expect) <= 1e-8);
}

TEST_CASE("tensor truncation radius barely matters")
{
    GridSpec r6, r10;
    r6.radius = 6.0;
    r10.radius = 10.0;
    r6.nodes = r10.nodes = 96;
    double const a6 = alpha_gaussian(kl_market(), r6, true).value;
    double const a10 = alpha_gaussian(kl_market(), r10, true).value;
    CHECK(std::abs(a6 - a10) < 1e-10);
}

TEST_CASE("discretized alpha approaches the closed form as the grid refines")
{
    double previous = 1.0;
    for (std::size_t k : {8u, 16u, 32u, 64u}) {
        GridSpec spec;
        spec.nodes = k;
        spec.tolerance = 1.0;
        double const err = std::abs(alpha_general(kl_market(), spec).value - frozen::kl_gauss_1d);
        CHECK(err <= std::max(previous, 1e-9));
        previous = err;
    }
    CHECK(previous <= 1e-9);
}

TEST_CASE("trajectory examples")
{
    std::vector<std::size_t> const up_down{0, 1};
    auto const t = run_trajectory(binary(), Strategy::constant_fraction(0.2), up_down, 1.0);
    REQUIRE(t.wealth.size() == 3);
    CHECK(t.wealth[1] == doctest::Approx(1.2));
    CHECK(t.wealth[2] == doctest::Approx(0.96));
    CHECK(std::abs(t.rate[1] - frozen::ln_0_96) <= 1e-15);

    std::vector<std::size_t> const up_up{0, 0};
    auto const u = run_trajectory(binary(), Strategy::constant_fraction(0.2), up_up, 1.0);
    CHECK(std::abs(u.rate[1] - u.compensator[1] - frozen::rate_minus_comp_up_up) <= 1e-15);

    std::vector<std::size_t> const seq{0, 1, 1, 0, 1};
    auto const idle = run_trajectory(binary(), Strategy::constant_fraction(0.0), seq, 7.0);
    for (std::size_t j = 0; j < seq.size(); ++j) {
        CHECK(idle.wealth[j + 1] == 7.0);
        CHECK(idle.rate[j] == 0.0);
        CHECK(idle.rate[j] - idle.compensator[j] ==
              doctest::Approx(-static_cast<double>(j + 1) * frozen::alpha_binary).epsilon(1e-14));
    }
}

TEST_CASE("trajectory invariants")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    auto const mk = binary();
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t const n = 1 + rng() % 30;
        std::vector<std::size_t> seq(n);
        for (auto& i : seq) {
            i = rng() % 2;
        }
        auto const s = Strategy::constant_fraction(u(rng));
        auto const t = run_trajectory(mk, s, seq, 1.0);
        CHECK(std::abs(t.rate.back() - std::log(t.wealth.back() / t.wealth.front())) <= 1e-12);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(t.wealth[j + 1] > 0.0);
            double const step_alpha = t.compensator[j] - (j == 0 ? 0.0 : t.compensator[j - 1]);
            CHECK(step_alpha == doctest::Approx(frozen::alpha_binary).epsilon(1e-12));
        }
        for (double z0 : {0.01, 1000.0}) {
            auto const scaled = run_trajectory(mk, s, seq, z0);
            CHECK(std::abs(scaled.rate.back() - t.rate.back()) <= 1e-12);
        }
    }
}

TEST_CASE("ruined trajectories report the step")
{
    std::vector<std::size_t> const seq{0, 0, 1};
    try {
        run_trajectory(binary(), Strategy::constant_fraction(1.0), seq, 1.0);
        FAIL("expected RuinViolation");
    } catch (RuinError const& e) {
        CHECK(e.step() == 3);
    }
}

TEST_CASE("gaussian trajectory and csv")
{
    auto const gm = kl_market();
    std::vector<Point> xs;
    for (double x : {-1.0, 0.5, 2.0}) {
        xs.push_back(Point::Constant(1, x));
    }
    auto const t = run_trajectory(gm, Strategy::constant_fraction(0.5), xs, 1.0, alpha_gaussian(gm));
    CHECK(std::abs(t.rate.back() - std::log(t.wealth.back())) <= 1e-12);

    std::ostringstream os;
    write_csv(os, t);
    auto const text = os.str();
    CHECK(text.rfind("step,outcome,Z,S,A,S_minus_A\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
