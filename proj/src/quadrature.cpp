// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "wkelly/error.hpp"
#include "wkelly/numeric.hpp"
#include "wkelly/rng.hpp"

namespace wkelly {

std::string_view to_string(QuadratureScheme s) noexcept
{
    return s == QuadratureScheme::tensor ? "tensor" : "gaussian";
}

std::string_view to_string(QuadratureMethod m) noexcept
{
    switch (m) {
    case QuadratureMethod::tensor: return "tensor";
    case QuadratureMethod::gaussian: return "gaussian";
    case QuadratureMethod::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

void validate(GridSpec const& spec)
{
    if (spec.nodes < 2) {
        throw Error(ErrorCode::InvalidGrid, "need K >= 2 nodes per dimension");
    }
    if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
        throw Error(ErrorCode::InvalidGrid, "truncation radius must be positive");
    }
    if (!(spec.tolerance > 0.0)) {
        throw Error(ErrorCode::InvalidGrid, "tolerance must be positive");
    }
}

//---------------------------------------------------------------------------//
// One-dimensional rules
//---------------------------------------------------------------------------//

NodeRule gauss_legendre(std::size_t k)
{
    if (k < 1) {
        throw Error(ErrorCode::InvalidGrid, "Gauss-Legendre needs at least one node");
    }
    NodeRule rule{std::vector<double>(k), std::vector<double>(k)};
    auto const n = static_cast<double>(k);
    for (std::size_t i = 0; i < (k + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                double const p2 = p1;
                p1 = p0;
                auto const jj = static_cast<double>(j);
                p0 = ((2.0 * jj + 1.0) * x * p1 - jj * p2) / (jj + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            double const dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Re-evaluate the derivative at the converged node.
        double p0 = 1.0;
        double p1 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double const p2 = p1;
            p1 = p0;
            auto const jj = static_cast<double>(j);
            p0 = ((2.0 * jj + 1.0) * x * p1 - jj * p2) / (jj + 1.0);
        }
        dp = n * (x * p0 - p1) / (x * x - 1.0);
        double const w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[k - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[k - 1 - i] = w;
    }
    if (k % 2 == 1) {
        rule.nodes[k / 2] = 0.0;
    }
    return rule;
}

namespace {

/// Orthonormal probabilists' Hermite polynomials h_0..h_{k} at x.
void hermite_orthonormal(double x, std::size_t k, std::vector<double>& h)
{
    h.assign(k + 1, 0.0);
    h[0] = 1.0;
    if (k >= 1) {
        h[1] = x;
    }
    for (std::size_t j = 1; j < k; ++j) {
        auto const jj = static_cast<double>(j);
        h[j + 1] = (x * h[j] - std::sqrt(jj) * h[j - 1]) / std::sqrt(jj + 1.0);
    }
}

}  // namespace

NodeRule gauss_hermite(std::size_t k)
{
    if (k < 1) {
        throw Error(ErrorCode::InvalidGrid, "Gauss-Hermite needs at least one node");
    }
    auto const n = static_cast<Eigen::Index>(k);
    // Golub-Welsch: eigenvalues of the Jacobi matrix give the nodes.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(static_cast<double>(i));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
    NodeRule rule{std::vector<double>(k), std::vector<double>(k)};
    std::vector<double> h;
    for (std::size_t i = 0; i < k; ++i) {
        double x = eig.eigenvalues()(static_cast<Eigen::Index>(i));
        // Newton polish on h_k; h_k' = sqrt(k) h_{k-1}.
        for (int iter = 0; iter < 5; ++iter) {
            hermite_orthonormal(x, k, h);
            double const dx = h[k] / (std::sqrt(static_cast<double>(k)) * h[k - 1]);
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) {
                break;
            }
        }
        hermite_orthonormal(x, k, h);
        CompensatedSum s;
        for (std::size_t j = 0; j < k; ++j) {
            s.add(h[j] * h[j]);
        }
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / s.value();
    }
    // Symmetrize against eigen-solver round-off.
    for (std::size_t i = 0; i < k / 2; ++i) {
        double const x = 0.5 * (rule.nodes[k - 1 - i] - rule.nodes[i]);
        double const w = 0.5 * (rule.weights[i] + rule.weights[k - 1 - i]);
        rule.nodes[i] = -x;
        rule.nodes[k - 1 - i] = x;
        rule.weights[i] = rule.weights[k - 1 - i] = w;
    }
    if (k % 2 == 1) {
        rule.nodes[k / 2] = 0.0;
    }
    return rule;
}

//---------------------------------------------------------------------------//
// Product rules
//---------------------------------------------------------------------------//

namespace {

template<class Visit>
void for_each_product(NodeRule const& rule, std::size_t dim, Visit&& visit)
{
    std::size_t const k = rule.nodes.size();
    std::vector<std::size_t> idx(dim, 0);
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    while (true) {
        double w = 1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            z(static_cast<Eigen::Index>(d)) = rule.nodes[idx[d]];
            w *= rule.weights[idx[d]];
        }
        visit(z, w);
        std::size_t d = dim;
        while (d > 0) {
            --d;
            if (++idx[d] < k) {
                break;
            }
            idx[d] = 0;
            if (d == 0) {
                return;
            }
        }
    }
}

std::size_t product_size(std::size_t k, std::size_t dim)
{
    std::size_t n = 1;
    for (std::size_t d = 0; d < dim; ++d) {
        n *= k;
    }
    return n;
}

void require_tensor_dim(std::size_t dim)
{
    if (dim == 0 || dim > max_tensor_dim) {
        throw Error(ErrorCode::InvalidGrid, "product rules support 1 <= dim <= " + std::to_string(max_tensor_dim)
                                                + ", got " + std::to_string(dim));
    }
}

}  // namespace

NodeSet tensor_nodes(Eigen::VectorXd const& half_widths, std::size_t k)
{
    auto const dim = static_cast<std::size_t>(half_widths.size());
    require_tensor_dim(dim);
    NodeRule const rule = gauss_legendre(k);
    NodeSet out;
    out.points.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(product_size(k, dim)));
    out.weights.reserve(product_size(k, dim));
    double const jac = half_widths.prod();
    Eigen::Index col = 0;
    for_each_product(rule, dim, [&](Eigen::VectorXd const& z, double w) {
        out.points.col(col++) = z.cwiseProduct(half_widths);
        out.weights.push_back(w * jac);
    });
    return out;
}

NodeSet gaussian_nodes(Eigen::MatrixXd const& chol, std::size_t k)
{
    auto const dim = static_cast<std::size_t>(chol.rows());
    require_tensor_dim(dim);
    NodeRule const rule = gauss_hermite(k);
    NodeSet out;
    out.points.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(product_size(k, dim)));
    out.weights.reserve(product_size(k, dim));
    Eigen::Index col = 0;
    for_each_product(rule, dim, [&](Eigen::VectorXd const& z, double w) {
        out.points.col(col++) = chol.triangularView<Eigen::Lower>() * z;
        out.weights.push_back(w);
    });
    return out;
}

//---------------------------------------------------------------------------//
// Integration
//---------------------------------------------------------------------------//

namespace {

Eigen::VectorXd half_widths_of(Eigen::MatrixXd const& covariance, double radius)
{
    return radius * covariance.diagonal().cwiseSqrt();
}

/// Sum over a product rule with weights mapped by `weight_of(point, w)`.
template<class WeightOf>
double product_sum(NodeSet const& nodes, Integrand const& h, WeightOf&& weight_of)
{
    CompensatedSum acc;
    Point x(nodes.points.rows());
    for (std::size_t j = 0; j < nodes.weights.size(); ++j) {
        x = nodes.points.col(static_cast<Eigen::Index>(j));
        double const w = weight_of(x, nodes.weights[j]);
        if (w != 0.0) {
            acc.add(w * h(x));
        }
    }
    return acc.value();
}

QuadratureResult monte_carlo(Integrand const& h, Eigen::MatrixXd const& chol, double log_det, bool lebesgue,
                             GridSpec const& spec)
{
    auto const dim = chol.rows();
    std::vector<double> samples(spec.mc_samples);
    SplitMix64 rng = make_stream(spec.mc_seed, 0);
    NormalSampler normal;
    Eigen::VectorXd z(dim);
    for (auto& s : samples) {
        for (Eigen::Index d = 0; d < dim; ++d) {
            z(d) = normal(rng);
        }
        Point const x = chol.triangularView<Eigen::Lower>() * z;
        double v = h(x);
        if (lebesgue) {
            v /= std::exp(gaussian_log_pdf(chol, log_det, x));
        }
        s = v;
    }
    auto const moments = MomentAccumulator::from_block(samples);
    return {moments.mean, moments.standard_error(), QuadratureMethod::monte_carlo, samples.size()};
}

QuadratureResult integrate_impl(Integrand const& h, Eigen::MatrixXd const& covariance, GridSpec const& spec,
                                Eigen::VectorXd const& box, bool lebesgue)
{
    validate(spec);
    Eigen::MatrixXd const chol = cholesky_lower(covariance);
    double const log_det = 2.0 * chol.diagonal().array().log().sum();
    auto const dim = static_cast<std::size_t>(covariance.rows());
    if (dim > max_tensor_dim) {
        return monte_carlo(h, chol, log_det, lebesgue, spec);
    }
    auto const evaluate = [&](GridSpec const& s) {
        if (s.scheme == QuadratureScheme::tensor) {
            if (box.size() != 0 && static_cast<std::size_t>(box.size()) != dim) {
                throw Error(ErrorCode::DimensionMismatch, "box and covariance dimensions differ");
            }
            NodeSet const nodes = tensor_nodes(box.size() != 0 ? box : half_widths_of(covariance, s.radius), s.nodes);
            if (lebesgue) {
                return product_sum(nodes, h, [](Point const&, double w) { return w; });
            }
            return product_sum(nodes, h, [&](Point const& x, double w) {
                return w * std::exp(gaussian_log_pdf(chol, log_det, x));
            });
        }
        NodeSet const nodes = gaussian_nodes(chol, s.nodes);
        if (lebesgue) {
            return product_sum(nodes, h, [&](Point const& x, double w) {
                return w * std::exp(-gaussian_log_pdf(chol, log_det, x));
            });
        }
        return product_sum(nodes, h, [](Point const&, double w) { return w; });
    };
    return with_refinement(spec, evaluate, "integral");
}

}  // namespace

QuadratureResult with_refinement(GridSpec const& spec, std::function<double(GridSpec const&)> const& evaluate,
                                 std::string_view what)
{
    validate(spec);
    GridSpec fine = spec;
    fine.nodes = 2 * spec.nodes;
    double const coarse_value = evaluate(spec);
    double const fine_value = evaluate(fine);
    double const err = std::abs(coarse_value - fine_value);
    if (!(err <= spec.tolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": |Q(" << spec.nodes << ") - Q(" << fine.nodes << ")| = " << err << " exceeds "
           << spec.tolerance;
        throw Error(ErrorCode::QuadratureNotConverged, os.str());
    }
    auto const method = spec.scheme == QuadratureScheme::tensor ? QuadratureMethod::tensor
                                                                : QuadratureMethod::gaussian;
    return {fine_value, err, method, 0};
}

QuadratureResult integrate(Integrand const& h, Eigen::MatrixXd const& covariance, GridSpec const& spec,
                           Eigen::VectorXd const& half_widths)
{
    return integrate_impl(h, covariance, spec, half_widths, false);
}

QuadratureResult integrate_lebesgue(Integrand const& h, Eigen::MatrixXd const& scale, GridSpec const& spec,
                                    Eigen::VectorXd const& half_widths)
{
    return integrate_impl(h, scale, spec, half_widths, true);
}

Eigen::VectorXd market_half_widths(GaussianMarket const& market, double radius)
{
    return radius * market.sigma().diagonal().cwiseMax(market.sigma0().diagonal()).cwiseSqrt();
}

GridMarket discretize_gaussian_market(GaussianMarket const& market, GridSpec const& spec)
{
    validate(spec);
    require_tensor_dim(market.dim());
    NodeSet nodes = spec.scheme == QuadratureScheme::tensor
                        ? tensor_nodes(market_half_widths(market, spec.radius), spec.nodes)
                        : gaussian_nodes(market.sigma_chol(), spec.nodes);
    std::size_t const count = nodes.weights.size();
    std::vector<double> density(count), reference(count), weights(count), returns(count);
    std::vector<double> quad_weights(count);
    Point x(nodes.points.rows());
    for (std::size_t j = 0; j < count; ++j) {
        x = nodes.points.col(static_cast<Eigen::Index>(j));
        density[j] = market.density(x);
        reference[j] = market.reference(x);
        weights[j] = market.weight()(x);
        returns[j] = market.returns()(x);
        // Gauss-Hermite weights are probabilities under f; convert to dmu.
        quad_weights[j] = spec.scheme == QuadratureScheme::tensor ? nodes.weights[j] : nodes.weights[j] / density[j];
    }
    CompensatedSum mass;
    for (std::size_t j = 0; j < count; ++j) {
        mass.add(quad_weights[j] * density[j]);
    }
    if (double const r = std::abs(mass.value() - 1.0); r > spec.tolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "density mass on the grid differs from 1 by " << r;
        throw Error(ErrorCode::QuadratureNotConverged, os.str());
    }
    return build_grid_market(std::move(nodes.points), std::move(quad_weights), std::move(density),
                             std::move(reference), std::move(weights), std::move(returns), spec.tolerance);
}

}  // namespace wkelly
