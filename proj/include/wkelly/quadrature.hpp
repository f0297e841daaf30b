// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wkelly/market.hpp"

namespace wkelly {

enum class QuadratureScheme {
    tensor,    ///< Gauss-Legendre product rule on a box of R standard deviations
    gaussian,  ///< Gauss-Hermite product rule mapped through a Cholesky factor
};

std::string_view to_string(QuadratureScheme s) noexcept;

struct GridSpec {
    QuadratureScheme scheme = QuadratureScheme::tensor;
    std::size_t nodes = 64;  ///< per-dimension node count K
    double radius = 8.0;     ///< box half-width in standard deviations
    double tolerance = tol::quadrature;
    /// Fallback for dim > max_tensor_dim.
    std::size_t mc_samples = std::size_t{1} << 20;
    std::uint64_t mc_seed = 0x5eed'0f'9a55'1a4eULL;
};

inline constexpr std::size_t max_tensor_dim = 3;

/// Throws InvalidGrid unless K >= 2 and R > 0.
void validate(GridSpec const& spec);

/// One-dimensional rule.
struct NodeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
NodeRule gauss_legendre(std::size_t k);

/// Gauss-Hermite rule for the standard normal: sum_i w_i h(x_i) approximates
/// E[h(Z)], Z ~ N(0, 1), exactly for polynomials of degree <= 2k - 1.
NodeRule gauss_hermite(std::size_t k);

/// Product-rule nodes in R^d with the weights they carry.
struct NodeSet {
    Eigen::MatrixXd points;  ///< dim x count
    std::vector<double> weights;
};

/// Lebesgue-measure weights on the box prod_i [-h_i, h_i].
NodeSet tensor_nodes(Eigen::VectorXd const& half_widths, std::size_t k);

/// Probability weights: sum_j w_j h(x_j) approximates E[h(X)], X ~ N(0, LL^T).
NodeSet gaussian_nodes(Eigen::MatrixXd const& chol, std::size_t k);

enum class QuadratureMethod { tensor, gaussian, monte_carlo };

std::string_view to_string(QuadratureMethod m) noexcept;

struct QuadratureResult {
    double value = 0.0;
    /// |Q(K) - Q(2K)| for rules, the standard error for Monte Carlo.
    double error_estimate = 0.0;
    QuadratureMethod method = QuadratureMethod::tensor;
    std::size_t evaluations = 0;
};

using Integrand = std::function<double(Point const&)>;

/// Integral of h(x) N(x; 0, covariance) dx. The value comes from the refined
/// (2K) rule; throws QuadratureNotConverged when |Q(K) - Q(2K)| exceeds the
/// tolerance. For dim > 3 the integral is estimated by Monte Carlo and the
/// standard error is reported instead of being checked.
///
/// Tensor rules integrate over the box [-half_widths, half_widths]; when it is
/// empty the box is R standard deviations of `covariance`.
QuadratureResult integrate(Integrand const& h, Eigen::MatrixXd const& covariance, GridSpec const& spec,
                           Eigen::VectorXd const& half_widths = Eigen::VectorXd());

/// Integral of h(x) dx over R^d; `scale` is a covariance that sets where the
/// nodes are placed.
QuadratureResult integrate_lebesgue(Integrand const& h, Eigen::MatrixXd const& scale, GridSpec const& spec,
                                    Eigen::VectorXd const& half_widths = Eigen::VectorXd());

/// Evaluates a grid-dependent quantity at K and 2K nodes and applies the same
/// convergence rule as integrate().
QuadratureResult with_refinement(GridSpec const& spec, std::function<double(GridSpec const&)> const& evaluate,
                                 std::string_view what);

/// Box half-widths used for a market: R times the larger marginal standard
/// deviation of sigma and sigma0 in each coordinate.
Eigen::VectorXd market_half_widths(GaussianMarket const& market, double radius);

/// Evaluates f, b, phi and g at the nodes of `spec`. The density mass residual
/// is recorded in the result; it is never renormalized away.
GridMarket discretize_gaussian_market(GaussianMarket const& market, GridSpec const& spec);

}  // namespace wkelly
