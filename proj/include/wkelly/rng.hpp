// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace wkelly {

/// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += golden_gamma;
        return mix64(state_);
    }

    static constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

  private:
    std::uint64_t state_;
};

/// Stream keyed by (seed, index): the starting state is a hash of both, so a
/// path's draws depend only on its index and never on scheduling.
constexpr SplitMix64 make_stream(std::uint64_t seed, std::uint64_t index) noexcept
{
    return SplitMix64(mix64(seed ^ mix64(index * SplitMix64::golden_gamma + 0x632be59bd9b4e019ULL)));
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
template<class Rng>
double uniform_open(Rng& rng) noexcept
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Box-Muller standard normals. Holds the spare variate, so one sampler per
/// stream.
class NormalSampler {
  public:
    template<class Rng>
    double operator()(Rng& rng) noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double const r = std::sqrt(-2.0 * std::log(uniform_open(rng)));
        double const theta = 2.0 * std::numbers::pi * uniform_open(rng);
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wkelly
