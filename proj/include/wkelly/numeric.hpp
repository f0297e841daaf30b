// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace wkelly {

/// Neumaier-compensated running sum. Order of add() calls defines the result,
/// so callers that need reproducibility must feed terms in a canonical order.
class CompensatedSum {
  public:
    void add(double term) noexcept
    {
        double const t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            comp_ += (sum_ - t) + term;
        } else {
            comp_ += (term - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> terms) noexcept
{
    CompensatedSum acc;
    for (double t : terms) {
        acc.add(t);
    }
    return acc.value();
}

/// Mean and sum of squared deviations of a block of samples, mergeable with
/// Chan's parallel update. Merging blocks in a fixed order gives results that
/// do not depend on how blocks were scheduled.
struct MomentAccumulator {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    static MomentAccumulator from_block(std::span<const double> xs) noexcept
    {
        MomentAccumulator acc;
        if (xs.empty()) {
            return acc;
        }
        acc.count = static_cast<double>(xs.size());
        acc.mean = compensated_sum(xs) / acc.count;
        CompensatedSum sq;
        for (double x : xs) {
            double const d = x - acc.mean;
            sq.add(d * d);
        }
        acc.m2 = sq.value();
        return acc;
    }

    void merge(MomentAccumulator const& other) noexcept
    {
        if (other.count == 0.0) {
            return;
        }
        if (count == 0.0) {
            *this = other;
            return;
        }
        double const total = count + other.count;
        double const delta = other.mean - mean;
        mean += delta * other.count / total;
        m2 += other.m2 + delta * delta * count * other.count / total;
        count = total;
    }

    double sample_variance() const noexcept { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
    double standard_error() const noexcept
    {
        return count > 0.0 ? std::sqrt(sample_variance() / count) : 0.0;
    }
};

}  // namespace wkelly
