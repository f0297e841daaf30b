// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/oracle.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "wkelly/engine.hpp"
#include "wkelly/error.hpp"

namespace wkelly {

namespace {

std::string describe_prefix(std::span<const std::size_t> prefix)
{
    std::ostringstream os;
    os << "prefix [";
    for (std::size_t j = 0; j < prefix.size(); ++j) {
        os << (j ? "," : "") << prefix[j];
    }
    os << "]";
    return os.str();
}

class TreeWalk {
  public:
    TreeWalk(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, double alpha,
             std::map<std::vector<std::size_t>, double>* drifts)
        : market_(market), strategy_(strategy), n_(n), alpha_(alpha), drifts_(drifts)
    {
        indices_.reserve(n);
        values_.reserve(n);
    }

    /// Expected sum of the remaining weighted log-increments below this node.
    double expected_remaining(double wealth)
    {
        std::size_t const depth = indices_.size();
        if (depth == n_) {
            return 0.0;
        }
        double const c = stake(strategy_, HistoryView{indices_, values_, 1}, wealth).stake;
        std::size_t const m = market_.size();

        std::vector<double> next_wealth(m);
        std::vector<double> inc(m);
        for (std::size_t i = 0; i < m; ++i) {
            double const e = market_.outcomes()[i];
            try {
                next_wealth[i] = wealth_step(wealth, c, e, depth + 1);
            } catch (RuinError const&) {
                indices_.push_back(i);
                std::string const where = describe_prefix(indices_);
                indices_.pop_back();
                std::ostringstream os;
                os.precision(17);
                os << "stake " << c << " at wealth " << wealth << " is ruined by " << where;
                throw RuinError(depth + 1, os.str());
            }
            inc[i] = rate_increment(market_.weights()[i], next_wealth[i], wealth);
        }
        if (drifts_ != nullptr) {
            double one_step = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                one_step += market_.probs()[i] * inc[i];
            }
            (*drifts_)[indices_] = one_step - alpha_;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            indices_.push_back(i);
            values_.push_back(market_.outcomes()[i]);
            double const below = expected_remaining(next_wealth[i]);
            indices_.pop_back();
            values_.pop_back();
            total += market_.probs()[i] * (inc[i] + below);
        }
        return total;
    }

  private:
    DiscreteMarket const& market_;
    Strategy const& strategy_;
    std::size_t n_;
    double alpha_;
    std::map<std::vector<std::size_t>, double>* drifts_;
    std::vector<std::size_t> indices_;
    std::vector<double> values_;
};

std::uint64_t leaf_count(std::size_t m, std::size_t n, std::uint64_t cap)
{
    std::uint64_t leaves = 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (leaves > cap / m) {
            throw Error(ErrorCode::EnumerationTooLarge,
                        std::to_string(m) + "^" + std::to_string(n) + " sequences exceed the cap of "
                            + std::to_string(cap));
        }
        leaves *= m;
    }
    if (leaves > cap) {
        throw Error(ErrorCode::EnumerationTooLarge, "sequence count exceeds the cap");
    }
    return leaves;
}

}  // namespace

ExactResult exact_expected_rate(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, double z0,
                                ExactOptions const& options)
{
    if (!(z0 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "initial wealth must be positive");
    }
    ExactResult r;
    r.n = n;
    r.sequences_enumerated = leaf_count(market.size(), n, options.max_sequences);
    r.alpha = alpha_discrete(market).value;
    if (options.record_drifts) {
        r.per_node_drifts.emplace();
    }
    TreeWalk walk(market, strategy, n, r.alpha, r.per_node_drifts ? &*r.per_node_drifts : nullptr);
    r.expected_rate = walk.expected_remaining(z0);
    r.supermartingale_gap = static_cast<double>(n) * r.alpha - r.expected_rate;
    return r;
}

double conditional_drift(DiscreteMarket const& market, Strategy const& strategy,
                         std::span<const std::size_t> prefix, double z0)
{
    if (!(z0 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "initial wealth must be positive");
    }
    std::vector<double> values;
    double wealth = z0;
    for (std::size_t j = 0; j < prefix.size(); ++j) {
        std::size_t const i = prefix[j];
        if (i >= market.size()) {
            throw Error(ErrorCode::InvalidArgument, "outcome index out of range in prefix");
        }
        double const c = stake(strategy, HistoryView{prefix.first(j), values, 1}, wealth).stake;
        wealth = wealth_step(wealth, c, market.outcomes()[i], j + 1);
        values.push_back(market.outcomes()[i]);
    }
    double const c = stake(strategy, HistoryView{prefix, values, 1}, wealth).stake;
    double drift = 0.0;
    for (std::size_t i = 0; i < market.size(); ++i) {
        double const next = wealth_step(wealth, c, market.outcomes()[i], prefix.size() + 1);
        drift += market.probs()[i] * rate_increment(market.weights()[i], next, wealth);
    }
    return drift - alpha_discrete(market).value;
}

std::vector<SweepPoint> sweep_fraction(DiscreteMarket const& market, std::span<const double> fractions,
                                       std::size_t n, double z0)
{
    std::vector<SweepPoint> out;
    out.reserve(fractions.size());
    for (double d : fractions) {
        auto const r = exact_expected_rate(market, Strategy::constant_fraction(d), n, z0);
        out.push_back({d, r.expected_rate, r.supermartingale_gap});
    }
    return out;
}

std::vector<double> fraction_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::InvalidArgument, "fraction grid needs lo <= hi and step > 0");
    }
    std::vector<double> grid;
    auto const count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
    grid.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid.push_back(lo + static_cast<double>(k) * step);
    }
    return grid;
}

SweepPoint sweep_argmax(std::span<const SweepPoint> sweep)
{
    if (sweep.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty sweep");
    }
    SweepPoint best = sweep.front();
    for (auto const& p : sweep) {
        if (p.expected_rate > best.expected_rate) {
            best = p;
        }
    }
    return best;
}

void write_csv(std::ostream& os, std::span<const SweepPoint> sweep)
{
    auto const old_precision = os.precision(17);
    os << "D,expected_rate,gap\n";
    for (auto const& p : sweep) {
        os << p.D << ',' << p.expected_rate << ',' << p.gap << '\n';
    }
    os.precision(old_precision);
}

}  // namespace wkelly
