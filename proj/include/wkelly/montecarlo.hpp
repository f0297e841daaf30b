// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wkelly/engine.hpp"
#include "wkelly/market.hpp"
#include "wkelly/strategy.hpp"

namespace wkelly {

enum class RuinPolicy {
    error,  ///< the first ruined path aborts the run with RuinError
    skip,   ///< ruined paths are counted and left out of every statistic
};

struct SimulationOptions {
    /// Worker threads; 0 means default_thread_count().
    unsigned threads = 0;
    RuinPolicy ruin = RuinPolicy::error;
};

/// WEIGHTED_KELLY_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

struct SimulationReport {
    std::size_t paths = 0;
    std::size_t n = 0;
    double mean_S_n = 0.0;
    double std_error = 0.0;
    double alpha_times_n = 0.0;
    /// (mean_S_n - n alpha) / std_error; infinite when the error is zero and
    /// the mean differs from n alpha.
    double z_score = 0.0;
    std::uint64_t seed = 0;
    std::size_t ruin_count = 0;
};

struct StepDrift {
    std::size_t step = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
};

/// Empirical mean of phi ln(Z_j / Z_{j-1}) - alpha at each step j.
struct DriftReport {
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    std::size_t ruin_count = 0;
    double alpha = 0.0;
    std::vector<StepDrift> steps;
};

/// Path p draws from make_stream(seed, p), and per-path results are reduced
/// in fixed-size blocks merged in path order, so reports are bit-identical
/// for any thread count.
SimulationReport simulate(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, std::size_t paths,
                          std::uint64_t seed, double z0, SimulationOptions const& options = {});

SimulationReport simulate(GaussianMarket const& market, Strategy const& strategy, AlphaValue const& alpha,
                          std::size_t n, std::size_t paths, std::uint64_t seed, double z0,
                          SimulationOptions const& options = {});

DriftReport drift_test(DiscreteMarket const& market, Strategy const& strategy, std::size_t n, std::size_t paths,
                       std::uint64_t seed, double z0 = 1.0, SimulationOptions const& options = {});

DriftReport drift_test(GaussianMarket const& market, Strategy const& strategy, AlphaValue const& alpha,
                       std::size_t n, std::size_t paths, std::uint64_t seed, double z0 = 1.0,
                       SimulationOptions const& options = {});

/// Draws of N(0, sigma) for path p from the same streams simulate() uses.
Point sample_gaussian(Eigen::MatrixXd const& chol, std::uint64_t seed, std::uint64_t path);

/// Upper bound on rows written by write_paths_csv.
inline constexpr std::size_t max_dump_rows = 1'000'000;

/// Columns: path, step, Z, S. Replays the same streams as simulate(); throws
/// InvalidArgument when paths * (n + 1) exceeds max_dump_rows.
void write_paths_csv(std::ostream& os, DiscreteMarket const& market, Strategy const& strategy, std::size_t n,
                     std::size_t paths, std::uint64_t seed, double z0);

}  // namespace wkelly
