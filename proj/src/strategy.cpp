// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/strategy.hpp"

#include <cmath>
#include <sstream>

#include "wkelly/conditions.hpp"
#include "wkelly/error.hpp"

namespace wkelly {

std::string_view to_string(Strategy::Kind kind) noexcept
{
    switch (kind) {
    case Strategy::Kind::constant_fraction: return "constant_fraction";
    case Strategy::Kind::table: return "table";
    case Strategy::Kind::custom: return "custom";
    }
    return "unknown";
}

namespace {

void require_fraction(double D)
{
    if (!(D >= 0.0 && D <= 1.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "fraction " << D << " outside [0, 1]";
        throw Error(ErrorCode::DOutOfRange, os.str());
    }
}

}  // namespace

Strategy Strategy::constant_fraction(double D)
{
    require_fraction(D);
    Strategy s;
    s.kind_ = Kind::constant_fraction;
    s.fraction_ = D;
    s.rule_ = [D](HistoryView const&, double wealth) { return D * wealth; };
    std::ostringstream os;
    os.precision(17);
    os << "constant_fraction(" << D << ")";
    s.label_ = os.str();
    return s;
}

Strategy Strategy::table(std::vector<double> fractions, std::size_t branching)
{
    if (branching < 2) {
        throw Error(ErrorCode::InvalidM, "table strategy needs a branching factor of at least 2");
    }
    if (fractions.empty()) {
        throw Error(ErrorCode::InvalidArgument, "table strategy needs at least the root entry");
    }
    for (double f : fractions) {
        if (!std::isfinite(f)) {
            throw Error(ErrorCode::InvalidArgument, "table fractions must be finite");
        }
        if (f < 0.0) {
            throw Error(ErrorCode::NegativeStake, "table fractions must be non-negative");
        }
    }
    Strategy s;
    s.kind_ = Kind::table;
    s.table_ = std::move(fractions);
    s.branching_ = branching;
    s.label_ = "table";
    s.rule_ = [table = s.table_, branching](HistoryView const& h, double wealth) {
        if (h.indices.size() != h.length()) {
            throw Error(ErrorCode::InvalidArgument, "table strategies need discrete outcome indices");
        }
        // Breadth-first position of the node reached by the history.
        std::size_t level_start = 0;
        std::size_t level_width = 1;
        std::size_t offset = 0;
        for (std::size_t i : h.indices) {
            if (i >= branching) {
                throw Error(ErrorCode::InvalidArgument, "outcome index exceeds the table branching");
            }
            level_start += level_width;
            level_width *= branching;
            offset = offset * branching + i;
        }
        std::size_t const node = level_start + offset;
        if (node >= table.size()) {
            throw Error(ErrorCode::TableExhausted, "no table entry for history of length "
                                                       + std::to_string(h.indices.size()));
        }
        return table[node] * wealth;
    };
    return s;
}

Strategy Strategy::custom(StakeRule rule, std::string label)
{
    Strategy s;
    s.kind_ = Kind::custom;
    s.rule_ = std::move(rule);
    s.label_ = std::move(label);
    return s;
}

double Strategy::raw_stake(HistoryView const& history, double wealth) const { return rule_(history, wealth); }

StakeCheck stake(Strategy const& strategy, HistoryView const& history, double wealth,
                 std::span<const double> support_returns)
{
    if (!(wealth > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "wealth must be positive");
    }
    StakeCheck out;
    out.stake = strategy.raw_stake(history, wealth);
    if (!std::isfinite(out.stake)) {
        throw Error(ErrorCode::InvalidArgument, "stake rule returned a non-finite stake");
    }
    if (out.stake < 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << strategy.label() << " returned stake " << out.stake;
        throw Error(ErrorCode::NegativeStake, os.str());
    }
    out.exceeds_wealth = out.stake > wealth;
    for (double g : support_returns) {
        if (!(1.0 + out.stake * g / wealth > 0.0)) {
            out.deposit_violation = true;
            break;
        }
    }
    return out;
}

Strategy optimal_strategy(DiscreteMarket const& market)
{
    auto const feas = martingale_feasibility(market);
    if (!feas.feasible) {
        throw Error(ErrorCode::NoMartingaleStrategy, feas.reason);
    }
    return Strategy::constant_fraction(*feas.D);
}

Strategy optimal_strategy(GridMarket const& market)
{
    auto const feas = martingale_feasibility_grid(market);
    if (!feas.feasible) {
        throw Error(ErrorCode::NoMartingaleStrategy, feas.reason);
    }
    return Strategy::constant_fraction(*feas.D);
}

}  // namespace wkelly
