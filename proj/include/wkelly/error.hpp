// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wkelly {

/// Every failure the library reports. The names are part of the CLI's JSON
/// error object and must stay stable.
enum class ErrorCode {
    ProbSumError,
    NegativeWeight,
    NonPositiveProb,
    NonPositiveReference,
    DuplicateOutcome,
    LengthMismatch,
    InvalidM,
    NotPositiveDefinite,
    CovariancesEqual,
    DimensionMismatch,
    InvalidGrid,
    QuadratureNotConverged,
    ZeroReturnOutcome,
    AllReturnsNearZero,
    DOutOfRange,
    NoMartingaleStrategy,
    NegativeStake,
    TableExhausted,
    RuinViolation,
    EnumerationTooLarge,
    InvalidArgument,
    SchemaError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string const& detail);

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }
    std::string const& detail() const noexcept { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

/// Raised when a wealth update would make 1 + C g / Z non-positive.
class RuinError : public Error {
  public:
    RuinError(std::size_t step, std::string const& detail);

    /// 1-based index of the step whose update failed.
    std::size_t step() const noexcept { return step_; }

  private:
    std::size_t step_;
};

}  // namespace wkelly
