// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wkelly/market.hpp"
#include "wkelly/quadrature.hpp"

namespace wkelly {

/// Admissibility of a market for the supermartingale bound:
///   orthogonality   sum/integral of phi * b * g        == 0
///   reference mass  sum/integral of phi * b  <=  E[phi]
struct ConditionReport {
    double orthogonality_residual = 0.0;
    double mass_lhs = 0.0;
    double mass_rhs = 0.0;
    bool orthogonality_passed = false;
    bool mass_passed = false;
    double tolerance_used = 0.0;

    /// Total mass of b. The reference is never renormalized; this is reported
    /// so a non-normalized b is visible.
    double reference_total = 1.0;
    /// Quadrature error estimates (zero for exact sums).
    double orthogonality_error = 0.0;
    double mass_error = 0.0;
    /// Gaussian markets only: the orthogonality integral taken against the
    /// product kernel exp(-x'(inv(sigma) + inv(sigma0))x / 2) dx. Reported as
    /// a diagnostic; it does not vanish for the martingale return function.
    std::optional<double> product_kernel_residual;

    bool passed() const noexcept { return orthogonality_passed && mass_passed; }
};

struct MassSides {
    double lhs = 0.0;
    double rhs = 0.0;
    double error_estimate = 0.0;
};

double check_orthogonality(DiscreteMarket const& market);
double check_orthogonality(GridMarket const& market);
/// E_b[phi g]; throws QuadratureNotConverged.
QuadratureResult check_orthogonality(GaussianMarket const& market, GridSpec const& spec = {});

MassSides check_reference_mass(DiscreteMarket const& market);
MassSides check_reference_mass(GridMarket const& market);
MassSides check_reference_mass(GaussianMarket const& market, GridSpec const& spec = {});

QuadratureResult product_kernel_orthogonality(GaussianMarket const& market, GridSpec const& spec = {});

ConditionReport condition_report(DiscreteMarket const& market, double tolerance = tol::condition);
ConditionReport condition_report(GridMarket const& market, double tolerance = tol::condition);
ConditionReport condition_report(GaussianMarket const& market, GridSpec const& spec = {},
                                 double tolerance = tol::condition);

struct FeasibilityResult {
    bool feasible = false;
    /// The common betting fraction, present only when feasible.
    std::optional<double> D;
    /// One candidate per outcome (or grid node); NaN where the candidate is
    /// unconstrained and excluded from the spread.
    std::vector<double> per_outcome_D;
    double max_spread = 0.0;
    double tolerance_used = 0.0;
    /// Why the market is infeasible; empty when feasible.
    std::string reason;
};

/// Proportional-betting test for IID discrete markets with uniform reference:
/// feasible iff the candidates (m p_i - 1) / E_i agree, lie in [0, 1] and keep
/// 1 + D E_i > 0. The candidates use 1/m whatever reference the market
/// carries; for a general reference use martingale_feasibility_grid(as_grid(m)).
FeasibilityResult martingale_feasibility(DiscreteMarket const& market,
                                         double tolerance = tol::feasibility_discrete);

/// General form f = b (1 + D g) on grid nodes: candidates (f/b - 1) / g on
/// nodes with f > 0 and |g| > return_floor.
FeasibilityResult martingale_feasibility_grid(GridMarket const& market, double tolerance = tol::feasibility_grid,
                                              double return_floor = tol::return_floor);

/// The return function that makes betting the fraction D a martingale
/// strategy for outcomes N(0, sigma) against reference N(0, sigma0):
///   g(x) = ( sqrt(det(sigma0 inv(sigma))) exp(-x'(inv(sigma) - inv(sigma0))x / 2) - 1 ) / D.
/// Requires 0 < D < 1.
PointFunction construct_return_gaussian(Eigen::MatrixXd const& sigma, Eigen::MatrixXd const& sigma0, double D);

}  // namespace wkelly
