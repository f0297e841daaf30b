// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "wkelly/error.hpp"
#include "wkelly/numeric.hpp"

namespace wkelly {

double check_orthogonality(DiscreteMarket const& market)
{
    CompensatedSum acc;
    for (std::size_t i = 0; i < market.size(); ++i) {
        acc.add(market.weights()[i] * market.reference()[i] * market.outcomes()[i]);
    }
    return acc.value();
}

double check_orthogonality(GridMarket const& market)
{
    CompensatedSum acc;
    for (std::size_t k = 0; k < market.size(); ++k) {
        acc.add(market.quad_weights[k] * market.weights[k] * market.reference[k] * market.returns[k]);
    }
    return acc.value();
}

QuadratureResult check_orthogonality(GaussianMarket const& market, GridSpec const& spec)
{
    auto const& phi = market.weight();
    auto const& g = market.returns();
    return integrate([&](Point const& x) { return phi(x) * g(x); }, market.sigma0(), spec,
                     market_half_widths(market, spec.radius));
}

MassSides check_reference_mass(DiscreteMarket const& market)
{
    CompensatedSum lhs;
    CompensatedSum rhs;
    for (std::size_t i = 0; i < market.size(); ++i) {
        lhs.add(market.weights()[i] * market.reference()[i]);
        rhs.add(market.weights()[i] * market.probs()[i]);
    }
    return {lhs.value(), rhs.value(), 0.0};
}

MassSides check_reference_mass(GridMarket const& market)
{
    CompensatedSum lhs;
    CompensatedSum rhs;
    for (std::size_t k = 0; k < market.size(); ++k) {
        lhs.add(market.quad_weights[k] * market.weights[k] * market.reference[k]);
        rhs.add(market.quad_weights[k] * market.weights[k] * market.density[k]);
    }
    return {lhs.value(), rhs.value(), 0.0};
}

MassSides check_reference_mass(GaussianMarket const& market, GridSpec const& spec)
{
    auto const& phi = market.weight();
    Eigen::VectorXd const box = market_half_widths(market, spec.radius);
    auto const lhs = integrate(phi, market.sigma0(), spec, box);
    auto const rhs = integrate(phi, market.sigma(), spec, box);
    return {lhs.value, rhs.value, std::max(lhs.error_estimate, rhs.error_estimate)};
}

QuadratureResult product_kernel_orthogonality(GaussianMarket const& market, GridSpec const& spec)
{
    auto const d = market.sigma().rows();
    Eigen::MatrixXd const id = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd const precision = market.sigma().llt().solve(id) + market.sigma0().llt().solve(id);
    Eigen::MatrixXd const kernel_cov = precision.llt().solve(id);
    Eigen::MatrixXd const kernel_cov_sym = 0.5 * (kernel_cov + kernel_cov.transpose());
    auto const& phi = market.weight();
    auto const& g = market.returns();
    return integrate_lebesgue(
        [&](Point const& x) { return phi(x) * g(x) * std::exp(-0.5 * x.dot(precision * x)); }, kernel_cov_sym,
        spec, market_half_widths(market, spec.radius));
}

namespace {

ConditionReport assemble(double residual, MassSides mass, double reference_total, double tolerance)
{
    ConditionReport r;
    r.orthogonality_residual = residual;
    r.mass_lhs = mass.lhs;
    r.mass_rhs = mass.rhs;
    r.mass_error = mass.error_estimate;
    r.tolerance_used = tolerance;
    r.orthogonality_passed = std::abs(residual) <= tolerance;
    r.mass_passed = mass.lhs <= mass.rhs + tolerance;
    r.reference_total = reference_total;
    return r;
}

}  // namespace

ConditionReport condition_report(DiscreteMarket const& market, double tolerance)
{
    return assemble(check_orthogonality(market), check_reference_mass(market), compensated_sum(market.reference()),
                    tolerance);
}

ConditionReport condition_report(GridMarket const& market, double tolerance)
{
    CompensatedSum ref;
    for (std::size_t k = 0; k < market.size(); ++k) {
        ref.add(market.quad_weights[k] * market.reference[k]);
    }
    return assemble(check_orthogonality(market), check_reference_mass(market), ref.value(), tolerance);
}

ConditionReport condition_report(GaussianMarket const& market, GridSpec const& spec, double tolerance)
{
    auto const orth = check_orthogonality(market, spec);
    auto report = assemble(orth.value, check_reference_mass(market, spec), 1.0, tolerance);
    report.orthogonality_error = orth.error_estimate;
    report.product_kernel_residual = product_kernel_orthogonality(market, spec).value;
    return report;
}

//---------------------------------------------------------------------------//
// Martingale feasibility
//---------------------------------------------------------------------------//

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Fills spread, D and the feasibility verdict from the candidates.
/// `positive_on_support(D)` checks 1 + D g > 0 wherever the density is positive.
template<class PositiveCheck>
void finish(FeasibilityResult& r, PositiveCheck&& positive_on_support)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double c : r.per_outcome_D) {
        if (!std::isnan(c)) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    if (lo > hi) {
        // Every candidate unconstrained: only D = 0 is consistent.
        lo = hi = 0.0;
    }
    r.max_spread = hi - lo;
    if (r.max_spread > r.tolerance_used) {
        r.reason = "candidate fractions disagree";
        return;
    }
    double const mid = 0.5 * (lo + hi);
    if (mid < -r.tolerance_used || mid > 1.0 + r.tolerance_used) {
        std::ostringstream os;
        os.precision(17);
        os << "common fraction " << mid << " lies outside [0, 1]";
        r.reason = os.str();
        return;
    }
    double const d = std::clamp(mid, 0.0, 1.0);
    if (!positive_on_support(d)) {
        r.reason = "1 + D g is not positive on the support";
        return;
    }
    r.feasible = true;
    r.D = d;
}

}  // namespace

FeasibilityResult martingale_feasibility(DiscreteMarket const& market, double tolerance)
{
    FeasibilityResult r;
    r.tolerance_used = tolerance;
    auto const m = static_cast<double>(market.size());
    auto const E = market.outcomes();
    auto const p = market.probs();
    r.per_outcome_D.reserve(market.size());
    for (std::size_t i = 0; i < market.size(); ++i) {
        double const excess = m * p[i] - 1.0;
        if (E[i] == 0.0) {
            if (std::abs(excess) > tolerance) {
                throw Error(ErrorCode::ZeroReturnOutcome,
                            "outcome " + std::to_string(i) + " has zero return but m p_i != 1");
            }
            r.per_outcome_D.push_back(nan);
            continue;
        }
        r.per_outcome_D.push_back(excess / E[i]);
    }
    finish(r, [&](double d) {
        return std::all_of(E.begin(), E.end(), [d](double e) { return 1.0 + d * e > 0.0; });
    });
    return r;
}

FeasibilityResult martingale_feasibility_grid(GridMarket const& market, double tolerance, double return_floor)
{
    FeasibilityResult r;
    r.tolerance_used = tolerance;
    r.per_outcome_D.assign(market.size(), nan);
    bool any = false;
    for (std::size_t k = 0; k < market.size(); ++k) {
        if (!(market.density[k] > 0.0)) {
            continue;
        }
        double const excess = market.density[k] / market.reference[k] - 1.0;
        double const g = market.returns[k];
        if (std::abs(g) <= return_floor) {
            // f = b (1 + D g) with D <= 1 forces f/b - 1 to within |g|.
            if (std::abs(excess) > std::abs(g) + tolerance) {
                r.reason = "density differs from reference where the return vanishes";
                r.max_spread = std::numeric_limits<double>::infinity();
                return r;
            }
            continue;
        }
        any = true;
        r.per_outcome_D[k] = excess / g;
    }
    if (!any) {
        throw Error(ErrorCode::AllReturnsNearZero, "no grid node with |g| above the return floor");
    }
    // Where f/b is far below one, 1 + D g cancels to rounding noise; the
    // factorisation then implies positivity, so only a clear violation counts.
    finish(r, [&](double d) {
        for (std::size_t k = 0; k < market.size(); ++k) {
            if (market.density[k] > 0.0 && !(1.0 + d * market.returns[k] > -tolerance)) {
                return false;
            }
        }
        return true;
    });
    return r;
}

PointFunction construct_return_gaussian(Eigen::MatrixXd const& sigma, Eigen::MatrixXd const& sigma0, double D)
{
    if (!(D > 0.0 && D < 1.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "D = " << D << " must lie in the open interval (0, 1)";
        throw Error(ErrorCode::DOutOfRange, os.str());
    }
    if (sigma.rows() != sigma0.rows() || sigma.cols() != sigma0.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "sigma and sigma0 must have the same shape");
    }
    Eigen::MatrixXd const l = cholesky_lower(sigma);
    Eigen::MatrixXd const l0 = cholesky_lower(sigma0);
    double const log_scale = l0.diagonal().array().log().sum() - l.diagonal().array().log().sum();
    std::ostringstream label;
    label.precision(17);
    label << "martingale(D=" << D << ")";
    return PointFunction(
        [l, l0, log_scale, D](Point const& x) {
            double const q = l.triangularView<Eigen::Lower>().solve(x).squaredNorm();
            double const q0 = l0.triangularView<Eigen::Lower>().solve(x).squaredNorm();
            return (std::exp(log_scale - 0.5 * (q - q0)) - 1.0) / D;
        },
        label.str());
}

}  // namespace wkelly
