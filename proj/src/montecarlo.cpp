// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "wkelly/error.hpp"
#include "wkelly/numeric.hpp"
#include "wkelly/rng.hpp"

namespace wkelly {

unsigned default_thread_count()
{
    if (char const* env = std::getenv("WEIGHTED_KELLY_THREADS")) {
        char* end = nullptr;
        long const v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(std::min(v, 256L));
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

/// Paths per reduction block. Part of the reproducibility contract: changing
/// it changes the rounding of the reported statistics.
constexpr std::size_t block_size = 4096;

/// One realized step of a path.
struct Draw {
    double g;
    double phi;
    std::size_t index;  // discrete outcome index, unused for continuous
};

class DiscreteSampler {
  public:
    explicit DiscreteSampler(DiscreteMarket const& market) : market_(market)
    {
        double acc = 0.0;
        for (double p : market.probs()) {
            acc += p;
            cdf_.push_back(acc);
        }
    }

    std::size_t dim() const { return 1; }
    bool discrete() const { return true; }

    template<class Rng>
    Draw draw(Rng& rng, NormalSampler&, std::vector<double>& value) const
    {
        double const u = uniform_open(rng);
        auto const it = std::upper_bound(cdf_.begin(), cdf_.end() - 1, u);
        auto const i = static_cast<std::size_t>(it - cdf_.begin());
        value.assign(1, market_.outcomes()[i]);
        return {market_.outcomes()[i], market_.weights()[i], i};
    }

  private:
    DiscreteMarket const& market_;
    std::vector<double> cdf_;
};

class GaussianSampler {
  public:
    explicit GaussianSampler(GaussianMarket const& market) : market_(market) {}

    std::size_t dim() const { return market_.dim(); }
    bool discrete() const { return false; }

    template<class Rng>
    Draw draw(Rng& rng, NormalSampler& normal, std::vector<double>& value) const
    {
        auto const d = static_cast<Eigen::Index>(market_.dim());
        Eigen::VectorXd z(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            z(k) = normal(rng);
        }
        Point const x = market_.sigma_chol().triangularView<Eigen::Lower>() * z;
        value.assign(x.data(), x.data() + d);
        return {market_.returns()(x), market_.weight()(x), 0};
    }

  private:
    GaussianMarket const& market_;
};

struct PathResult {
    bool ruined = false;
    double final_rate = 0.0;
};

/// Plays one path; `increments[j]` receives phi ln(Z_j / Z_{j-1}) - alpha.
template<class Sampler>
PathResult play_path(Sampler const& sampler, Strategy const& strategy, double alpha, std::size_t n,
                     std::uint64_t seed, std::uint64_t path, double z0, RuinPolicy policy,
                     std::vector<double>& increments, std::vector<double>* wealth_out = nullptr,
                     std::vector<double>* rate_out = nullptr)
{
    SplitMix64 rng = make_stream(seed, path);
    NormalSampler normal;
    std::vector<std::size_t> indices;
    std::vector<double> values;
    std::vector<double> value;
    indices.reserve(n);
    values.reserve(n * sampler.dim());
    double wealth = z0;
    double rate = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        HistoryView const history{sampler.discrete() ? std::span<const std::size_t>(indices)
                                                     : std::span<const std::size_t>(),
                                  values, sampler.dim()};
        double const c = stake(strategy, history, wealth).stake;
        Draw const draw = sampler.draw(rng, normal, value);
        double const factor = 1.0 + c * draw.g / wealth;
        if (!(factor > 0.0)) {
            if (policy == RuinPolicy::skip) {
                return {true, 0.0};
            }
            std::ostringstream os;
            os.precision(17);
            os << "path " << path << ": 1 + C g / Z = " << factor;
            throw RuinError(j + 1, os.str());
        }
        double const next = wealth * factor;
        double const inc = draw.phi == 0.0 ? 0.0 : draw.phi * std::log(next / wealth);
        rate += inc;
        increments[j] = inc - alpha;
        wealth = next;
        if (wealth_out != nullptr) {
            wealth_out->push_back(wealth);
            rate_out->push_back(rate);
        }
        if (sampler.discrete()) {
            indices.push_back(draw.index);
        }
        values.insert(values.end(), value.begin(), value.end());
    }
    return {false, rate};
}

struct BlockStats {
    MomentAccumulator final_rate;
    std::vector<MomentAccumulator> steps;
    std::size_t ruined = 0;
};

struct RunTotals {
    MomentAccumulator final_rate;
    std::vector<MomentAccumulator> steps;
    std::size_t ruined = 0;
};

template<class Sampler>
RunTotals run_paths(Sampler const& sampler, Strategy const& strategy, double alpha, std::size_t n,
                    std::size_t paths, std::uint64_t seed, double z0, SimulationOptions const& options)
{
    if (paths < 1) {
        throw Error(ErrorCode::InvalidArgument, "need at least one path");
    }
    if (!(z0 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "initial wealth must be positive");
    }
    std::size_t const blocks = (paths + block_size - 1) / block_size;
    std::vector<BlockStats> stats(blocks);
    std::vector<std::exception_ptr> errors(blocks);

    auto const work_block = [&](std::size_t b) {
        std::size_t const first = b * block_size;
        std::size_t const last = std::min(paths, first + block_size);
        std::vector<double> finals;
        std::vector<std::vector<double>> per_step(n);
        finals.reserve(last - first);
        std::vector<double> increments(n);
        BlockStats& out = stats[b];
        for (std::size_t p = first; p < last; ++p) {
            PathResult const r = play_path(sampler, strategy, alpha, n, seed, p, z0, options.ruin, increments);
            if (r.ruined) {
                ++out.ruined;
                continue;
            }
            finals.push_back(r.final_rate);
            for (std::size_t j = 0; j < n; ++j) {
                per_step[j].push_back(increments[j]);
            }
        }
        out.final_rate = MomentAccumulator::from_block(finals);
        out.steps.reserve(n);
        for (auto const& s : per_step) {
            out.steps.push_back(MomentAccumulator::from_block(s));
        }
    };

    unsigned const threads = std::max(1u, std::min<unsigned>(options.threads ? options.threads
                                                                              : default_thread_count(),
                                                             static_cast<unsigned>(std::min<std::size_t>(blocks, 1024))));
    std::atomic<std::size_t> next{0};
    auto const worker = [&] {
        for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
            try {
                work_block(b);
            } catch (...) {
                errors[b] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    // The lowest failing block wins, whatever the schedule.
    for (auto const& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    RunTotals totals;
    totals.steps.resize(n);
    for (auto const& s : stats) {
        totals.final_rate.merge(s.final_rate);
        for (std::size_t j = 0; j < n; ++j) {
            totals.steps[j].merge(s.steps[j]);
        }
        totals.ruined += s.ruined;
    }
    return totals;
}

double z_of(double mean, double target, double se)
{
    if (se > 0.0) {
        return (mean - target) / se;
    }
    if (mean == target) {
        return 0.0;
    }
    return mean > target ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

template<class Sampler>
SimulationReport simulate_impl(Sampler const& sampler, Strategy const& strategy, double alpha, std::size_t n,
                               std::size_t paths, std::uint64_t seed, double z0, SimulationOptions const& options)
{
    RunTotals const t = run_paths(sampler, strategy, alpha, n, paths, seed, z0, options);
    SimulationReport r;
    r.paths = paths;
    r.n = n;
    r.seed = seed;
    r.ruin_count = t.ruined;
    r.mean_S_n = t.final_rate.mean;
    r.std_error = t.final_rate.standard_error();
    r.alpha_times_n = static_cast<double>(n) * alpha;
    r.z_score = z_of(r.mean_S_n, r.alpha_times_n, r.std_error);
    return r;
}

template<class Sampler>
DriftReport drift_impl(Sampler const& sampler, Strategy const& strategy, double alpha, std::size_t n,
                       std::size_t paths, std::uint64_t seed, double z0, SimulationOptions const& options)
{
    RunTotals const t = run_paths(sampler, strategy, alpha, n, paths, seed, z0, options);
    DriftReport r;
    r.paths = paths;
    r.seed = seed;
    r.ruin_count = t.ruined;
    r.alpha = alpha;
    for (std::size_t j = 0; j < n; ++j) {
        double const se = t.steps[j].standard_error();
        r.steps.push_back({j + 1, t.steps[j].mean, se, z_of(t.steps[j].mean, 0.0, se)});
    }
    return r;
}

}  // namespace

SimulationReport simulate(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, std::size_t paths,
                          std::uint64_t seed, double z0, SimulationOptions const& options)
{
    return simulate_impl(DiscreteSampler(market), strategy, alpha_discrete(market).value, n, paths, seed, z0,
                         options);
}

SimulationReport simulate(GaussianMarket const& market, Strategy const& strategy, AlphaValue const& alpha,
                          std::size_t n, std::size_t paths, std::uint64_t seed, double z0,
                          SimulationOptions const& options)
{
    return simulate_impl(GaussianSampler(market), strategy, alpha.value, n, paths, seed, z0, options);
}

DriftReport drift_test(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, std::size_t paths,
                       std::uint64_t seed, double z0, SimulationOptions const& options)
{
    return drift_impl(DiscreteSampler(market), strategy, alpha_discrete(market).value, n, paths, seed, z0, options);
}

DriftReport drift_test(GaussianMarket const& market, Strategy const& strategy, AlphaValue const& alpha,
                       std::size_t n, std::size_t paths, std::uint64_t seed, double z0,
                       SimulationOptions const& options)
{
    return drift_impl(GaussianSampler(market), strategy, alpha.value, n, paths, seed, z0, options);
}

Point sample_gaussian(Eigen::MatrixXd const& chol, std::uint64_t seed, std::uint64_t path)
{
    SplitMix64 rng = make_stream(seed, path);
    NormalSampler normal;
    Eigen::VectorXd z(chol.rows());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        z(k) = normal(rng);
    }
    return chol.triangularView<Eigen::Lower>() * z;
}

void write_paths_csv(std::ostream& os, DiscreteMarket const& market, Strategy const& strategy, std::size_t n,
                     std::size_t paths, std::uint64_t seed, double z0)
{
    if (paths == 0 || paths > max_dump_rows / (n + 1)) {
        throw Error(ErrorCode::InvalidArgument, "path dump would exceed " + std::to_string(max_dump_rows) + " rows");
    }
    DiscreteSampler const sampler(market);
    double const alpha = alpha_discrete(market).value;
    std::vector<double> increments(n);
    std::vector<double> wealth;
    std::vector<double> rate;
    auto const old_precision = os.precision(17);
    os << "path,step,Z,S\n";
    for (std::size_t p = 0; p < paths; ++p) {
        wealth.clear();
        rate.clear();
        play_path(sampler, strategy, alpha, n, seed, p, z0, RuinPolicy::error, increments, &wealth, &rate);
        os << p << ",0," << z0 << ",0\n";
        for (std::size_t j = 0; j < wealth.size(); ++j) {
            os << p << ',' << j + 1 << ',' << wealth[j] << ',' << rate[j] << '\n';
        }
    }
    os.precision(old_precision);
}

}  // namespace wkelly
