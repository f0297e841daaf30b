// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wkelly/market.hpp"
#include "wkelly/strategy.hpp"

namespace wkelly {

/// Exact E[S_n] for a discrete market, from the full m^n outcome tree.
struct ExactResult {
    double expected_rate = 0.0;
    std::size_t n = 0;
    std::uint64_t sequences_enumerated = 0;
    double alpha = 0.0;
    /// n alpha - E[S_n]; non-negative for admissible markets.
    double supermartingale_gap = 0.0;
    /// history prefix -> E[step increment of S - A | prefix], when requested.
    std::optional<std::map<std::vector<std::size_t>, double>> per_node_drifts;
};

struct ExactOptions {
    std::uint64_t max_sequences = std::uint64_t{1} << 24;
    bool record_drifts = false;
};

/// Depth-first walk over every outcome sequence of length n. The strategy is
/// queried at each tree node with that node's history, so history-dependent
/// rules are honoured. Sibling terms are summed left to right.
/// Throws EnumerationTooLarge and RuinError.
ExactResult exact_expected_rate(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, double z0,
                                ExactOptions const& options = {});

/// sum_i p_i phi_i ln(1 + C E_i / Z) - alpha at the node reached by `prefix`,
/// where C and Z are the stake and wealth there.
double conditional_drift(DiscreteMarket const& market, Strategy const& strategy,
                         std::span<const std::size_t> prefix, double z0 = 1.0);

struct SweepPoint {
    double D = 0.0;
    double expected_rate = 0.0;
    double gap = 0.0;
};

/// Exact E[S_n] of constant_fraction(D) for every D in the grid.
std::vector<SweepPoint> sweep_fraction(DiscreteMarket const& market, std::span<const double> fractions,
                                       std::size_t n, double z0 = 1.0);

/// lo, lo + step, ... up to hi (inclusive within half a step). Each point is
/// lo + k * step, so no error accumulates along the grid.
std::vector<double> fraction_grid(double lo, double hi, double step);

/// First point of the sweep with the largest expected rate.
SweepPoint sweep_argmax(std::span<const SweepPoint> sweep);

/// Columns: D, expected_rate, gap.
void write_csv(std::ostream& os, std::span<const SweepPoint> sweep);

}  // namespace wkelly
