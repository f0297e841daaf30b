// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

#include "wkelly/error.hpp"
#include "wkelly/market.hpp"

using namespace wkelly;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (Error const& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

Eigen::MatrixXd mat1(double v)
{
    return Eigen::MatrixXd::Constant(1, 1, v);
}

}  // namespace

TEST_CASE("discrete market examples")
{
    auto const a = build_discrete_market({1, -1}, {0.6, 0.4}, {1, 1}, {0.5, 0.5});
    CHECK(a.size() == 2);
    CHECK(a.has_uniform_reference());
    CHECK(a.has_unit_weights());
    CHECK(validate(a).empty());

    auto const fair = build_discrete_market({1, -1}, {0.5, 0.5}, {1, 1}, {0.5, 0.5});
    CHECK(validate(fair).empty());

    CHECK(code_of([] { build_discrete_market({1, -1}, {0.7, 0.4}, {1, 1}, {0.5, 0.5}); }) ==
          ErrorCode::ProbSumError);
}

TEST_CASE("discrete market errors")
{
    CHECK(code_of([] { build_discrete_market({1, -1}, {0.6, 0.4}, {1, -0.1}, {0.5, 0.5}); }) ==
          ErrorCode::NegativeWeight);
    CHECK(code_of([] { build_discrete_market({1, -1}, {1.0, 0.0}, {1, 1}, {0.5, 0.5}); }) ==
          ErrorCode::NonPositiveProb);
    CHECK(code_of([] { build_discrete_market({1, -1}, {0.6, 0.4}, {1, 1}, {0.5, 0.0}); }) ==
          ErrorCode::NonPositiveReference);
    CHECK(code_of([] { build_discrete_market({1, -1}, {0.6, 0.4}, {1}, {0.5, 0.5}); }) ==
          ErrorCode::LengthMismatch);
    CHECK(code_of([] { build_discrete_market({1}, {1.0}, {1}, {1.0}); }) == ErrorCode::InvalidM);
    CHECK(code_of([] {
              build_discrete_market({1, 1}, {0.6, 0.4}, {1, 1}, {0.5, 0.5}, OutcomeIdentity::by_value);
          }) == ErrorCode::DuplicateOutcome);
    // Indexed outcomes may share a return value.
    auto const three = build_discrete_market({2, -1, -1}, {0.4, 0.3, 0.3}, {1, 1, 1}, uniform_reference(3));
    CHECK(three.size() == 3);
}

TEST_CASE("probability sum tolerance is tight")
{
    CHECK_NOTHROW(build_discrete_market({1, -1}, {0.6, 0.4 + 5e-13}, {1, 1}, {0.5, 0.5}));
    CHECK(code_of([] { build_discrete_market({1, -1}, {0.6, 0.4 + 1e-11}, {1, 1}, {0.5, 0.5}); }) ==
          ErrorCode::ProbSumError);
}

TEST_CASE("discrete market keeps input order and values")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t const m = 2 + trial % 5;
        std::vector<double> e(m), p(m), phi(m), b(m);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            e[i] = u(rng);
            p[i] = 0.1 + std::abs(u(rng));
            phi[i] = std::abs(u(rng));
            b[i] = 0.05 + std::abs(u(rng));
            total += p[i];
        }
        for (auto& x : p) {
            x /= total;
        }
        double s = 0.0;
        for (double x : p) {
            s += x;
        }
        p.back() += 1.0 - s;
        auto const mk = build_discrete_market(e, p, phi, b);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(mk.outcomes()[i] == e[i]);
            CHECK(mk.probs()[i] == p[i]);
            CHECK(mk.weights()[i] == phi[i]);
            CHECK(mk.reference()[i] == b[i]);
        }
        CHECK(validate(mk).empty());
    }
}

TEST_CASE("uniform reference")
{
    auto const two = uniform_reference(2);
    CHECK(two == std::vector<double>{0.5, 0.5});
    auto const four = uniform_reference(4);
    CHECK(four == std::vector<double>{0.25, 0.25, 0.25, 0.25});
    CHECK(code_of([] { uniform_reference(1); }) == ErrorCode::InvalidM);
}

TEST_CASE("gaussian market examples")
{
    auto const one = PointFunction::constant(1.0);
    auto const zero = PointFunction::constant(0.0);
    auto const g = build_gaussian_market(1, mat1(1.0), mat1(2.0), one, zero);
    CHECK(g.dim() == 1);
    CHECK(g.density(Point::Zero(1)) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(g.reference(Point::Zero(1)) == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-15));

    CHECK(code_of([&] { build_gaussian_market(1, mat1(1.0), mat1(1.0), one, zero); }) ==
          ErrorCode::CovariancesEqual);

    Eigen::MatrixXd const i2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK_NOTHROW(build_gaussian_market(2, i2, 2.0 * i2, one, zero));

    CHECK(code_of([&] { build_gaussian_market(2, mat1(1.0), mat1(2.0), one, zero); }) ==
          ErrorCode::DimensionMismatch);
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK(code_of([&] { build_gaussian_market(2, bad, 2.0 * i2, one, zero); }) == ErrorCode::NotPositiveDefinite);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.1, 0.0, 1.0;
    CHECK(code_of([&] { build_gaussian_market(2, asym, 2.0 * i2, one, zero); }) ==
          ErrorCode::NotPositiveDefinite);
}

TEST_CASE("gaussian log density matches the formula")
{
    Eigen::MatrixXd s(2, 2);
    s << 2.0, 0.3, 0.3, 1.0;
    Eigen::MatrixXd const l = cholesky_lower(s);
    double const logdet = std::log(s.determinant());
    Point x(2);
    x << 0.7, -1.1;
    double const q = x.dot(s.inverse() * x);
    double const expect = -0.5 * q - 0.5 * logdet - std::log(2.0 * std::numbers::pi);
    CHECK(gaussian_log_pdf(l, logdet, x) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("grid market validation")
{
    Eigen::MatrixXd pts(1, 2);
    pts << -1.0, 1.0;
    auto const gm = build_grid_market(pts, {1.0, 1.0}, {0.5, 0.5}, {0.5, 0.5}, {1, 1}, {1, -1});
    CHECK(gm.size() == 2);
    CHECK(validate(gm).empty());
    CHECK(code_of([&] { build_grid_market(pts, {1.0, 1.0}, {0.5, 0.6}, {0.5, 0.5}, {1, 1}, {1, -1}); }) ==
          ErrorCode::ProbSumError);
    CHECK(code_of([&] { build_grid_market(pts, {1.0, -1.0}, {0.5, 0.5}, {0.5, 0.5}, {1, 1}, {1, -1}); }) ==
          ErrorCode::InvalidGrid);
    CHECK(code_of([&] { build_grid_market(pts, {1.0, 1.0}, {0.5, 0.5}, {0.5, 0.0}, {1, 1}, {1, -1}); }) ==
          ErrorCode::NonPositiveReference);

    auto const d = build_discrete_market({1, -1}, {0.6, 0.4}, {1, 1}, {0.5, 0.5});
    auto const as = as_grid(d);
    CHECK(as.size() == 2);
    CHECK(as.density[0] == 0.6);
    CHECK(as.returns[1] == -1.0);
    CHECK(validate(as).empty());
}
