// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/engine.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>

#include "wkelly/error.hpp"
#include "wkelly/numeric.hpp"

namespace wkelly {

std::string_view to_string(AlphaMethod m) noexcept
{
    switch (m) {
    case AlphaMethod::closed_form: return "closed-form";
    case AlphaMethod::quadrature: return "quadrature";
    case AlphaMethod::exact_sum: return "exact-sum";
    case AlphaMethod::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

double wealth_step(double z_prev, double stake, double g, std::size_t step)
{
    if (!(z_prev > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "wealth must be positive");
    }
    double const factor = 1.0 + stake * g / z_prev;
    if (!(factor > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "1 + C g / Z = " << factor << " (Z = " << z_prev << ", C = " << stake << ", g = " << g << ")";
        throw RuinError(step, os.str());
    }
    return z_prev * factor;
}

double rate_increment(double phi, double z_next, double z_prev)
{
    if (!(z_next > 0.0 && z_prev > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "wealths must be positive");
    }
    if (phi == 0.0) {
        return 0.0;
    }
    return phi * std::log(z_next / z_prev);
}

AlphaValue alpha_discrete(DiscreteMarket const& market)
{
    bool const uniform = market.has_uniform_reference();
    auto const m = static_cast<double>(market.size());
    CompensatedSum acc;
    for (std::size_t i = 0; i < market.size(); ++i) {
        double const p = market.probs()[i];
        double const ratio = uniform ? p * m : p / market.reference()[i];
        acc.add(market.weights()[i] * p * std::log(ratio));
    }
    return {acc.value(), AlphaMethod::exact_sum, 0.0};
}

AlphaValue alpha_general(GridMarket const& market)
{
    CompensatedSum acc;
    for (std::size_t k = 0; k < market.size(); ++k) {
        double const f = market.density[k];
        if (f > 0.0 && market.weights[k] != 0.0) {
            acc.add(market.quad_weights[k] * market.weights[k] * f * std::log(f / market.reference[k]));
        }
    }
    return {acc.value(), AlphaMethod::exact_sum, 0.0};
}

AlphaValue alpha_general(GaussianMarket const& market, GridSpec const& spec)
{
    auto const q = with_refinement(
        spec, [&](GridSpec const& s) { return alpha_general(discretize_gaussian_market(market, s)).value; },
        "alpha on the discretized market");
    return {q.value, AlphaMethod::quadrature, q.error_estimate};
}

AlphaValue alpha_gaussian_closed_form(GaussianMarket const& market)
{
    auto const c = market.weight().constant_value();
    if (!c) {
        throw Error(ErrorCode::InvalidArgument, "closed-form alpha needs a constant weight");
    }
    // tr(inv(sigma0) sigma) = || inv(L0) L ||_F^2
    Eigen::MatrixXd const m = market.sigma0_chol().triangularView<Eigen::Lower>().solve(market.sigma_chol());
    double const trace = m.squaredNorm();
    double const d = static_cast<double>(market.dim());
    double const log_det_ratio = market.log_det_sigma0() - market.log_det_sigma();
    return {*c * 0.5 * (trace - d + log_det_ratio), AlphaMethod::closed_form, 0.0};
}

AlphaValue alpha_gaussian(GaussianMarket const& market, GridSpec const& spec, bool force_quadrature)
{
    if (market.weight().constant_value() && !force_quadrature) {
        return alpha_gaussian_closed_form(market);
    }
    double const log_det_ratio = market.log_det_sigma0() - market.log_det_sigma();
    auto const& l = market.sigma_chol();
    auto const& l0 = market.sigma0_chol();
    auto const& phi = market.weight();
    auto const integrand = [&](Point const& x) {
        double const w = phi(x);
        if (w == 0.0) {
            return 0.0;
        }
        double const q0 = l0.triangularView<Eigen::Lower>().solve(x).squaredNorm();
        double const q = l.triangularView<Eigen::Lower>().solve(x).squaredNorm();
        return w * 0.5 * (q0 - q + log_det_ratio);
    };
    auto const r = integrate(integrand, market.sigma(), spec, market_half_widths(market, spec.radius));
    auto const method = r.method == QuadratureMethod::monte_carlo ? AlphaMethod::monte_carlo : AlphaMethod::quadrature;
    return {r.value, method, r.error_estimate};
}

//---------------------------------------------------------------------------//
// Trajectories
//---------------------------------------------------------------------------//

namespace {

void require_initial_wealth(double z0)
{
    if (!(z0 > 0.0) || !std::isfinite(z0)) {
        throw Error(ErrorCode::InvalidArgument, "initial wealth must be positive");
    }
}

void start(Trajectory& t, double z0, std::size_t n)
{
    t.wealth.reserve(n + 1);
    t.rate.reserve(n);
    t.compensator.reserve(n);
    t.stakes.reserve(n);
    t.outcomes.reserve(n);
    t.wealth.push_back(z0);
}

void advance(Trajectory& t, double stake, double g, double phi, double alpha, std::vector<double> outcome)
{
    std::size_t const step = t.rate.size() + 1;
    double const z_prev = t.wealth.back();
    double const z_next = wealth_step(z_prev, stake, g, step);
    double const s_prev = t.rate.empty() ? 0.0 : t.rate.back();
    double const a_prev = t.compensator.empty() ? 0.0 : t.compensator.back();
    t.wealth.push_back(z_next);
    t.rate.push_back(s_prev + rate_increment(phi, z_next, z_prev));
    t.compensator.push_back(a_prev + alpha);
    t.stakes.push_back(stake);
    t.outcomes.push_back(std::move(outcome));
}

}  // namespace

Trajectory run_trajectory(DiscreteMarket const& market, Strategy const& strategy,
                          std::span<const std::size_t> outcomes, double z0)
{
    require_initial_wealth(z0);
    double const alpha = alpha_discrete(market).value;
    std::vector<double> values;
    values.reserve(outcomes.size());
    Trajectory t;
    start(t, z0, outcomes.size());
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
        std::size_t const i = outcomes[j];
        if (i >= market.size()) {
            throw Error(ErrorCode::InvalidArgument, "outcome index " + std::to_string(i) + " out of range");
        }
        HistoryView const history{outcomes.first(j), values, 1};
        double const c = stake(strategy, history, t.wealth.back()).stake;
        double const e = market.outcomes()[i];
        advance(t, c, e, market.weights()[i], alpha, {e});
        values.push_back(e);
    }
    return t;
}

Trajectory run_trajectory(GaussianMarket const& market, Strategy const& strategy, std::span<const Point> outcomes,
                          double z0, AlphaValue const& alpha)
{
    require_initial_wealth(z0);
    std::size_t const dim = market.dim();
    std::vector<double> values;
    values.reserve(outcomes.size() * dim);
    Trajectory t;
    start(t, z0, outcomes.size());
    for (auto const& x : outcomes) {
        if (static_cast<std::size_t>(x.size()) != dim) {
            throw Error(ErrorCode::DimensionMismatch, "outcome dimension differs from the market's");
        }
        HistoryView const history{{}, values, dim};
        double const c = stake(strategy, history, t.wealth.back()).stake;
        std::vector<double> outcome(x.data(), x.data() + x.size());
        advance(t, c, market.returns()(x), market.weight()(x), alpha.value, outcome);
        values.insert(values.end(), outcome.begin(), outcome.end());
    }
    return t;
}

void write_csv(std::ostream& os, Trajectory const& t)
{
    auto const old_precision = os.precision(17);
    os << "step,outcome,Z,S,A,S_minus_A\n";
    os << 0 << ",," << t.wealth[0] << ',' << 0.0 << ',' << 0.0 << ',' << 0.0 << '\n';
    for (std::size_t j = 0; j < t.steps(); ++j) {
        os << j + 1 << ',';
        for (std::size_t c = 0; c < t.outcomes[j].size(); ++c) {
            os << (c ? ";" : "") << t.outcomes[j][c];
        }
        os << ',' << t.wealth[j + 1] << ',' << t.rate[j] << ',' << t.compensator[j] << ','
           << t.rate[j] - t.compensator[j] << '\n';
    }
    os.precision(old_precision);
}

}  // namespace wkelly
