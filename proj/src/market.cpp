// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/market.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "wkelly/error.hpp"
#include "wkelly/numeric.hpp"

namespace wkelly {

namespace {

void require_finite(std::span<const double> xs, char const* what)
{
    for (double x : xs) {
        if (!std::isfinite(x)) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + " contains a non-finite value");
        }
    }
}

std::string indexed(char const* what, std::size_t i, double value)
{
    std::ostringstream os;
    os.precision(17);
    os << what << "[" << i << "] = " << value;
    return os.str();
}

}  // namespace

PointFunction::PointFunction(Fn fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

PointFunction PointFunction::constant(double value)
{
    PointFunction f([value](Point const&) { return value; }, "constant");
    f.constant_ = value;
    return f;
}

//---------------------------------------------------------------------------//

bool DiscreteMarket::has_uniform_reference() const noexcept
{
    double const u = 1.0 / static_cast<double>(size());
    return std::all_of(reference_.begin(), reference_.end(), [u](double b) { return b == u; });
}

bool DiscreteMarket::has_unit_weights() const noexcept
{
    return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; });
}

std::vector<double> uniform_reference(std::size_t m)
{
    if (m < 2) {
        throw Error(ErrorCode::InvalidM, "need at least two outcomes, got m = " + std::to_string(m));
    }
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

DiscreteMarket build_discrete_market(std::vector<double> outcomes, std::vector<double> probs,
                                     std::vector<double> weights, std::vector<double> reference,
                                     OutcomeIdentity identity)
{
    std::size_t const m = outcomes.size();
    if (probs.size() != m || weights.size() != m || reference.size() != m) {
        throw Error(ErrorCode::LengthMismatch, "outcomes, probs, weights and reference must have equal length");
    }
    if (m < 2) {
        throw Error(ErrorCode::InvalidM, "need at least two outcomes, got m = " + std::to_string(m));
    }
    require_finite(outcomes, "outcomes");
    require_finite(probs, "probs");
    require_finite(weights, "weights");
    require_finite(reference, "reference");

    for (std::size_t i = 0; i < m; ++i) {
        if (!(probs[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveProb, indexed("probs", i, probs[i]));
        }
    }
    double const total = compensated_sum(probs);
    if (std::abs(total - 1.0) > tol::prob_sum) {
        std::ostringstream os;
        os.precision(17);
        os << "probabilities sum to " << total;
        throw Error(ErrorCode::ProbSumError, os.str());
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (weights[i] < 0.0) {
            throw Error(ErrorCode::NegativeWeight, indexed("weights", i, weights[i]));
        }
        if (!(reference[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveReference, indexed("reference", i, reference[i]));
        }
    }
    for (std::size_t i = 0; identity == OutcomeIdentity::by_value && i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (outcomes[i] == outcomes[j]) {
                throw Error(ErrorCode::DuplicateOutcome, indexed("outcomes", j, outcomes[j]));
            }
        }
    }

    DiscreteMarket market;
    market.outcomes_ = std::move(outcomes);
    market.probs_ = std::move(probs);
    market.weights_ = std::move(weights);
    market.reference_ = std::move(reference);
    return market;
}

//---------------------------------------------------------------------------//

Eigen::MatrixXd cholesky_lower(Eigen::MatrixXd const& m)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "covariance must be a non-empty square matrix");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "covariance contains a non-finite value");
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol::covariance * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
    }
    Eigen::MatrixXd l = llt.matrixL();
    if ((l.diagonal().array() <= 0.0).any()) {
        throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factor has a non-positive pivot");
    }
    return l;
}

double gaussian_log_pdf(Eigen::MatrixXd const& chol, double log_det, Point const& x)
{
    Eigen::VectorXd const z = chol.triangularView<Eigen::Lower>().solve(x);
    double const d = static_cast<double>(x.size());
    return -0.5 * z.squaredNorm() - 0.5 * log_det - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

namespace {

double log_det_from_chol(Eigen::MatrixXd const& l)
{
    return 2.0 * l.diagonal().array().log().sum();
}

}  // namespace

GaussianMarket build_gaussian_market(std::size_t dim, Eigen::MatrixXd sigma, Eigen::MatrixXd sigma0,
                                     PointFunction weight, PointFunction returns)
{
    auto const d = static_cast<Eigen::Index>(dim);
    if (dim == 0 || sigma.rows() != d || sigma.cols() != d || sigma0.rows() != d || sigma0.cols() != d) {
        throw Error(ErrorCode::DimensionMismatch, "sigma and sigma0 must both be " + std::to_string(dim) + "x"
                                                      + std::to_string(dim));
    }
    if (auto c = weight.constant_value(); c && *c < 0.0) {
        throw Error(ErrorCode::NegativeWeight, "constant weight is negative");
    }
    GaussianMarket market(std::move(weight), std::move(returns));
    market.chol_ = cholesky_lower(sigma);
    market.chol0_ = cholesky_lower(sigma0);
    if ((sigma - sigma0).cwiseAbs().maxCoeff() <= tol::covariance) {
        throw Error(ErrorCode::CovariancesEqual, "sigma and sigma0 coincide; the reference must differ");
    }
    market.log_det_ = log_det_from_chol(market.chol_);
    market.log_det0_ = log_det_from_chol(market.chol0_);
    market.sigma_ = std::move(sigma);
    market.sigma0_ = std::move(sigma0);
    return market;
}

double GaussianMarket::log_density(Point const& x) const { return gaussian_log_pdf(chol_, log_det_, x); }
double GaussianMarket::log_reference(Point const& x) const { return gaussian_log_pdf(chol0_, log_det0_, x); }
double GaussianMarket::density(Point const& x) const { return std::exp(log_density(x)); }
double GaussianMarket::reference(Point const& x) const { return std::exp(log_reference(x)); }

//---------------------------------------------------------------------------//

namespace {

double grid_mass(GridMarket const& g)
{
    CompensatedSum acc;
    for (std::size_t k = 0; k < g.size(); ++k) {
        acc.add(g.quad_weights[k] * g.density[k]);
    }
    return acc.value();
}

}  // namespace

std::vector<InvariantResidual> validate(GridMarket const& g, double mass_tolerance)
{
    std::vector<InvariantResidual> out;
    auto worst = [](std::span<const double> xs, auto&& bad) {
        double w = 0.0;
        for (double x : xs) {
            w = std::max(w, bad(x));
        }
        return w;
    };
    if (double r = worst(g.quad_weights, [](double w) { return w > 0.0 ? 0.0 : -w + 1.0; }); r > 0.0) {
        out.push_back({"quad_weights > 0", r});
    }
    if (double r = worst(g.density, [](double f) { return f >= 0.0 ? 0.0 : -f; }); r > 0.0) {
        out.push_back({"density >= 0", r});
    }
    if (double r = worst(g.reference, [](double b) { return b > 0.0 ? 0.0 : -b + 1.0; }); r > 0.0) {
        out.push_back({"reference > 0", r});
    }
    if (double r = worst(g.weights, [](double w) { return w >= 0.0 ? 0.0 : -w; }); r > 0.0) {
        out.push_back({"weights >= 0", r});
    }
    if (double r = std::abs(grid_mass(g) - 1.0); r > mass_tolerance) {
        out.push_back({"sum w f = 1", r});
    }
    return out;
}

GridMarket build_grid_market(Eigen::MatrixXd points, std::vector<double> quad_weights, std::vector<double> density,
                             std::vector<double> reference, std::vector<double> weights, std::vector<double> returns,
                             double mass_tolerance)
{
    std::size_t const k = quad_weights.size();
    if (k == 0 || static_cast<std::size_t>(points.cols()) != k || density.size() != k || reference.size() != k
        || weights.size() != k || returns.size() != k) {
        throw Error(ErrorCode::LengthMismatch, "grid arrays must all have one entry per node");
    }
    for (auto const* v : {&quad_weights, &density, &reference, &weights, &returns}) {
        require_finite(*v, "grid market");
    }
    GridMarket g{std::move(points), std::move(quad_weights), std::move(density), std::move(reference),
                 std::move(weights), std::move(returns), 0.0};
    for (std::size_t i = 0; i < k; ++i) {
        if (!(g.quad_weights[i] > 0.0)) {
            throw Error(ErrorCode::InvalidGrid, indexed("quad_weights", i, g.quad_weights[i]));
        }
        if (g.density[i] < 0.0) {
            throw Error(ErrorCode::NonPositiveProb, indexed("density", i, g.density[i]));
        }
        if (!(g.reference[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveReference, indexed("reference", i, g.reference[i]));
        }
        if (g.weights[i] < 0.0) {
            throw Error(ErrorCode::NegativeWeight, indexed("weights", i, g.weights[i]));
        }
    }
    g.mass_residual = grid_mass(g) - 1.0;
    if (std::abs(g.mass_residual) > mass_tolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "grid density mass differs from 1 by " << g.mass_residual;
        throw Error(ErrorCode::ProbSumError, os.str());
    }
    return g;
}

GridMarket as_grid(DiscreteMarket const& market)
{
    std::size_t const m = market.size();
    Eigen::MatrixXd points(1, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        points(0, static_cast<Eigen::Index>(i)) = market.outcomes()[i];
    }
    auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    return build_grid_market(std::move(points), std::vector<double>(m, 1.0), vec(market.probs()),
                             vec(market.reference()), vec(market.weights()), vec(market.outcomes()), tol::prob_sum);
}

std::vector<InvariantResidual> validate(DiscreteMarket const& market)
{
    std::vector<InvariantResidual> out;
    std::size_t const m = market.size();
    if (m < 2) {
        out.push_back({"m >= 2", static_cast<double>(2 - m)});
    }
    if (double r = std::abs(compensated_sum(market.probs()) - 1.0); r > tol::prob_sum) {
        out.push_back({"sum p = 1", r});
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!(market.probs()[i] > 0.0)) {
            out.push_back({"p > 0", -market.probs()[i]});
        }
        if (market.weights()[i] < 0.0) {
            out.push_back({"weights >= 0", -market.weights()[i]});
        }
        if (!(market.reference()[i] > 0.0)) {
            out.push_back({"reference > 0", -market.reference()[i]});
        }
        for (std::size_t j = i + 1; j < m; ++j) {
            if (market.outcomes()[i] == market.outcomes()[j]) {
                out.push_back({"outcomes distinct", 0.0});
            }
        }
    }
    return out;
}

}  // namespace wkelly
