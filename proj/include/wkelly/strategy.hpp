// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wkelly/market.hpp"

namespace wkelly {

/// Outcomes observed before the current step. Discrete markets fill both
/// `indices` and `values`; continuous markets leave `indices` empty and store
/// `dim` coordinates per step in `values`.
struct HistoryView {
    std::span<const std::size_t> indices;
    std::span<const double> values;
    std::size_t dim = 1;

    std::size_t length() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
};

/// Stake rule: (history, current wealth) -> stake. Must be pure.
using StakeRule = std::function<double(HistoryView const&, double)>;

/// A previsible betting strategy. The engine only ever hands the rule the
/// outcomes of earlier steps, so previsibility holds by construction.
class Strategy {
  public:
    enum class Kind { constant_fraction, table, custom };

    /// Stake D * wealth. Throws DOutOfRange unless 0 <= D <= 1.
    static Strategy constant_fraction(double D);

    /// Fraction of wealth per history node of an m-ary outcome tree, listed
    /// breadth-first: the root, then the m one-step histories, and so on.
    static Strategy table(std::vector<double> fractions, std::size_t branching);

    static Strategy custom(StakeRule rule, std::string label = "custom");

    Kind kind() const noexcept { return kind_; }
    /// The fraction of a constant-fraction strategy.
    std::optional<double> fraction() const noexcept { return fraction_; }
    std::span<const double> table_fractions() const noexcept { return table_; }
    std::size_t branching() const noexcept { return branching_; }
    std::string const& label() const noexcept { return label_; }

    /// Unchecked rule output.
    double raw_stake(HistoryView const& history, double wealth) const;

  private:
    Strategy() = default;

    Kind kind_ = Kind::custom;
    std::optional<double> fraction_;
    std::vector<double> table_;
    std::size_t branching_ = 0;
    StakeRule rule_;
    std::string label_;
};

std::string_view to_string(Strategy::Kind kind) noexcept;

struct StakeCheck {
    double stake = 0.0;
    /// stake > wealth: allowed for the supermartingale bound, not for the
    /// martingale certificate.
    bool exceeds_wealth = false;
    /// Some outcome in the support would lose the whole deposit or more,
    /// i.e. 1 + stake * g / wealth <= 0.
    bool deposit_violation = false;
};

/// Evaluates the rule and flags, without clamping, a stake above wealth and a
/// stake that the returns over `support_returns` could turn into ruin.
/// Throws NegativeStake when the rule returns a negative stake.
StakeCheck stake(Strategy const& strategy, HistoryView const& history, double wealth,
                 std::span<const double> support_returns = {});

/// The martingale strategy of a discrete market: constant_fraction(D) with D
/// from martingale_feasibility. Throws NoMartingaleStrategy when infeasible.
Strategy optimal_strategy(DiscreteMarket const& market);
Strategy optimal_strategy(GridMarket const& market);

}  // namespace wkelly
