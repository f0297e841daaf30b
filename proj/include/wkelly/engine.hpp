// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "wkelly/market.hpp"
#include "wkelly/quadrature.hpp"
#include "wkelly/strategy.hpp"

namespace wkelly {

enum class AlphaMethod { closed_form, quadrature, exact_sum, monte_carlo };

std::string_view to_string(AlphaMethod m) noexcept;

/// Per-step compensator alpha = E[phi ln(f / b)], in nats.
struct AlphaValue {
    double value = 0.0;
    AlphaMethod method = AlphaMethod::exact_sum;
    double error_estimate = 0.0;
};

/// Z_prev (1 + stake g / Z_prev). Throws RuinError (tagged with `step`) when
/// the factor is not positive.
double wealth_step(double z_prev, double stake, double g, std::size_t step = 0);

/// phi ln(Z_next / Z_prev).
double rate_increment(double phi, double z_next, double z_prev);

/// sum_i phi_i p_i ln(p_i m) for a uniform reference, sum_i phi_i p_i ln(p_i / b_i)
/// otherwise.
AlphaValue alpha_discrete(DiscreteMarket const& market);

/// sum_k w_k phi_k f_k ln(f_k / b_k) over nodes with f_k > 0.
AlphaValue alpha_general(GridMarket const& market);

/// alpha_general on the discretized market at K and 2K nodes; the error
/// estimate is the difference. Throws QuadratureNotConverged.
AlphaValue alpha_general(GaussianMarket const& market, GridSpec const& spec = {});

/// Closed form for a constant weight c:
///   c/2 { tr(inv(sigma0) sigma) - d + ln det(sigma0 inv(sigma)) }.
/// Throws InvalidArgument for a non-constant weight.
AlphaValue alpha_gaussian_closed_form(GaussianMarket const& market);

/// E_f[ phi(x)/2 { x'(inv(sigma0) - inv(sigma))x + ln det(sigma0 inv(sigma)) } ].
/// Uses the closed form when the weight is constant unless `force_quadrature`.
AlphaValue alpha_gaussian(GaussianMarket const& market, GridSpec const& spec = {}, bool force_quadrature = false);

/// A wealth path with its weighted rate S and compensator A.
struct Trajectory {
    std::vector<double> wealth;       ///< Z_0 .. Z_n
    std::vector<double> rate;         ///< S_1 .. S_n
    std::vector<double> compensator;  ///< A_1 .. A_n
    std::vector<double> stakes;       ///< C_1 .. C_n
    std::vector<std::vector<double>> outcomes;

    std::size_t steps() const noexcept { return rate.size(); }
};

/// Plays the outcome indices in order from initial wealth z0.
Trajectory run_trajectory(DiscreteMarket const& market, Strategy const& strategy,
                          std::span<const std::size_t> outcomes, double z0);

/// Plays Gaussian outcomes; `alpha` is the per-step compensator.
Trajectory run_trajectory(GaussianMarket const& market, Strategy const& strategy, std::span<const Point> outcomes,
                          double z0, AlphaValue const& alpha);

/// Columns: step, outcome, Z, S, A, S_minus_A. Row 0 is the initial state.
void write_csv(std::ostream& os, Trajectory const& trajectory);

}  // namespace wkelly
