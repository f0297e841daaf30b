// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wkelly::cli {

enum class Command {
    validate,
    conditions,
    alpha,
    feasibility,
    optimal,
    exact,
    sweep,
    simulate,
    drift_test,
    gaussian_return,
    trajectory,
};

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c) noexcept;

enum class Format { json, csv };

struct RunConfig {
    Command command = Command::validate;
    std::string market_path;
    std::string strategy_path;
    /// Shortcut for {"kind":"constant_fraction","D":...}.
    std::optional<double> fraction;
    std::size_t n = 1;
    std::size_t paths = 100'000;
    std::uint64_t seed = 0;
    double z0 = 1.0;
    std::string output_path;  ///< empty: standard output
    Format format = Format::json;

    unsigned threads = 0;  ///< 0: WEIGHTED_KELLY_THREADS or hardware
    bool skip_ruin = false;
    std::string dump_paths;

    double d_min = 0.0;
    double d_max = 1.0;
    double d_step = 0.01;

    std::vector<double> points;          ///< gaussian-return evaluation points
    std::vector<std::size_t> sequence;   ///< trajectory outcome indices

    std::optional<std::size_t> grid_nodes;
    std::optional<double> grid_radius;
    std::optional<std::string> grid_scheme;
    bool force_quadrature = false;
    bool record_drifts = false;
};

/// Raised for invalid configurations; run() maps it to exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_rejected = 1;
inline constexpr int exit_usage = 2;

/// Runs one command. Results go to config.output_path (or `out`); messages to
/// `err`. Returns 0 on success, 1 when a check fails or a module raises an
/// error (the JSON error object is still written), 2 on usage errors.
int run(RunConfig const& config, std::ostream& out, std::ostream& err);

}  // namespace wkelly::cli
