// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wkelly {

/// Default tolerances. All are absolute.
namespace tol {
inline constexpr double prob_sum = 1e-12;
inline constexpr double covariance = 1e-12;
inline constexpr double condition = 1e-9;
inline constexpr double feasibility_discrete = 1e-9;
inline constexpr double feasibility_grid = 1e-6;
inline constexpr double quadrature = 1e-9;
/// Grid points with |g| at or below this are skipped when solving for D.
inline constexpr double return_floor = 1e-8;
}  // namespace tol

using Point = Eigen::VectorXd;

/// A real-valued function of one outcome x in R^d, used for both weight
/// functions phi(x) and return functions g(x). A function built with
/// constant() remembers its value so closed forms can be used.
class PointFunction {
  public:
    using Fn = std::function<double(Point const&)>;

    PointFunction(Fn fn, std::string label);

    static PointFunction constant(double value);

    double operator()(Point const& x) const { return fn_(x); }
    std::optional<double> constant_value() const noexcept { return constant_; }
    std::string const& label() const noexcept { return label_; }

  private:
    Fn fn_;
    std::optional<double> constant_;
    std::string label_;
};

//---------------------------------------------------------------------------//
// Discrete IID market: outcome i pays E_i per unit stake with probability p_i.
//---------------------------------------------------------------------------//
enum class OutcomeIdentity { by_index, by_value };

class DiscreteMarket {
  public:
    std::size_t size() const noexcept { return outcomes_.size(); }
    std::span<const double> outcomes() const noexcept { return outcomes_; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> reference() const noexcept { return reference_; }

    /// True when every b_i equals 1/m exactly.
    bool has_uniform_reference() const noexcept;
    bool has_unit_weights() const noexcept;

  private:
    friend DiscreteMarket build_discrete_market(std::vector<double>, std::vector<double>,
                                                std::vector<double>, std::vector<double>, OutcomeIdentity);
    DiscreteMarket() = default;

    std::vector<double> outcomes_;
    std::vector<double> probs_;
    std::vector<double> weights_;
    std::vector<double> reference_;
};

/// Validates and builds a discrete market. Inputs are kept in the given order.
/// Outcomes are indexed events, so two of them may share a return value unless
/// `identity` is by_value, which raises DuplicateOutcome on a repeat.
DiscreteMarket build_discrete_market(std::vector<double> outcomes, std::vector<double> probs,
                                     std::vector<double> weights, std::vector<double> reference,
                                     OutcomeIdentity identity = OutcomeIdentity::by_index);

/// m copies of 1/m. Throws InvalidM for m < 2.
std::vector<double> uniform_reference(std::size_t m);

//---------------------------------------------------------------------------//
// IID Gaussian market: outcomes ~ N(0, sigma), reference b = N(0, sigma0).
//---------------------------------------------------------------------------//
class GaussianMarket {
  public:
    std::size_t dim() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
    Eigen::MatrixXd const& sigma() const noexcept { return sigma_; }
    Eigen::MatrixXd const& sigma0() const noexcept { return sigma0_; }
    /// Lower Cholesky factors.
    Eigen::MatrixXd const& sigma_chol() const noexcept { return chol_; }
    Eigen::MatrixXd const& sigma0_chol() const noexcept { return chol0_; }
    double log_det_sigma() const noexcept { return log_det_; }
    double log_det_sigma0() const noexcept { return log_det0_; }

    PointFunction const& weight() const noexcept { return weight_; }
    PointFunction const& returns() const noexcept { return returns_; }

    double log_density(Point const& x) const;
    double log_reference(Point const& x) const;
    double density(Point const& x) const;
    double reference(Point const& x) const;

  private:
    friend GaussianMarket build_gaussian_market(std::size_t, Eigen::MatrixXd, Eigen::MatrixXd,
                                                PointFunction, PointFunction);
    GaussianMarket(PointFunction weight, PointFunction returns)
        : weight_(std::move(weight)), returns_(std::move(returns))
    {
    }

    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd sigma0_;
    Eigen::MatrixXd chol_;
    Eigen::MatrixXd chol0_;
    double log_det_ = 0.0;
    double log_det0_ = 0.0;
    PointFunction weight_;
    PointFunction returns_;
};

GaussianMarket build_gaussian_market(std::size_t dim, Eigen::MatrixXd sigma, Eigen::MatrixXd sigma0,
                                     PointFunction weight, PointFunction returns);

/// Lower Cholesky factor of a symmetric positive-definite matrix.
/// Throws NotPositiveDefinite otherwise.
Eigen::MatrixXd cholesky_lower(Eigen::MatrixXd const& m);

/// log N(x; 0, LL^T) given the lower factor L and log det(LL^T).
double gaussian_log_pdf(Eigen::MatrixXd const& chol, double log_det, Point const& x);

//---------------------------------------------------------------------------//
// One-step market on a finite set of nodes x_k with integration weights w_k:
// integrals against dmu become sums over k of w_k * (...).
//---------------------------------------------------------------------------//
struct GridMarket {
    Eigen::MatrixXd points;  ///< dim x K, one column per node
    std::vector<double> quad_weights;
    std::vector<double> density;
    std::vector<double> reference;
    std::vector<double> weights;
    std::vector<double> returns;
    /// sum_k w_k f_k - 1, as found at construction (never renormalized).
    double mass_residual = 0.0;

    std::size_t size() const noexcept { return quad_weights.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(points.rows()); }
};

GridMarket build_grid_market(Eigen::MatrixXd points, std::vector<double> quad_weights,
                             std::vector<double> density, std::vector<double> reference,
                             std::vector<double> weights, std::vector<double> returns,
                             double mass_tolerance = tol::quadrature);

/// The discrete market viewed as a grid with unit weights on its outcomes.
GridMarket as_grid(DiscreteMarket const& market);

//---------------------------------------------------------------------------//
// Re-validation. Each entry is an invariant whose residual exceeds its
// tolerance; an empty result means the market is valid.
//---------------------------------------------------------------------------//
struct InvariantResidual {
    std::string invariant;
    double residual;
};

std::vector<InvariantResidual> validate(DiscreteMarket const& market);
std::vector<InvariantResidual> validate(GridMarket const& market,
                                        double mass_tolerance = tol::quadrature);

}  // namespace wkelly
