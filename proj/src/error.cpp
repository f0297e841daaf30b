// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/error.hpp"

namespace wkelly {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ProbSumError: return "ProbSumError";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NonPositiveProb: return "NonPositiveProb";
    case ErrorCode::NonPositiveReference: return "NonPositiveReference";
    case ErrorCode::DuplicateOutcome: return "DuplicateOutcome";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidM: return "InvalidM";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::CovariancesEqual: return "CovariancesEqual";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::ZeroReturnOutcome: return "ZeroReturnOutcome";
    case ErrorCode::AllReturnsNearZero: return "AllReturnsNearZero";
    case ErrorCode::DOutOfRange: return "DOutOfRange";
    case ErrorCode::NoMartingaleStrategy: return "NoMartingaleStrategy";
    case ErrorCode::NegativeStake: return "NegativeStake";
    case ErrorCode::TableExhausted: return "TableExhausted";
    case ErrorCode::RuinViolation: return "RuinViolation";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SchemaError: return "SchemaError";
    }
    return "UnknownError";
}

Error::Error(ErrorCode code, std::string const& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail)
    , code_(code)
    , detail_(detail)
{
}

RuinError::RuinError(std::size_t step, std::string const& detail)
    : Error(ErrorCode::RuinViolation, "step " + std::to_string(step) + ": " + detail)
    , step_(step)
{
}

}  // namespace wkelly
