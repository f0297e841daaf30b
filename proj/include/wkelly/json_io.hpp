// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <variant>

#include <json.hpp>

#include "wkelly/conditions.hpp"
#include "wkelly/engine.hpp"
#include "wkelly/market.hpp"
#include "wkelly/montecarlo.hpp"
#include "wkelly/oracle.hpp"
#include "wkelly/quadrature.hpp"
#include "wkelly/strategy.hpp"

namespace wkelly {

using json = nlohmann::json;

using AnyMarket = std::variant<DiscreteMarket, GaussianMarket>;

struct LoadedMarket {
    AnyMarket market;
    /// From the optional "grid" member; defaults otherwise.
    GridSpec grid;
};

/// Parses and validates a market document. Schema problems throw SchemaError;
/// a well-formed document describing an invalid market throws the market's
/// own error (ProbSumError, CovariancesEqual, ...).
LoadedMarket market_from_json(json const& doc);
LoadedMarket load_market(std::filesystem::path const& path);

/// Weight catalog: "one", {"kind":"constant","value":c},
/// {"kind":"polynomial","coeffs":[c0,c1,...],"coord":i},
/// {"kind":"box","lower":[...],"upper":[...],"inside":1,"outside":0}.
PointFunction weight_from_json(json const& spec, std::size_t dim);

/// Return catalog: {"form":"martingale","D":d} (the martingale return function for
/// the market's covariances), {"form":"linear","coeffs":[...]},
/// {"form":"constant","value":c}.
PointFunction return_from_json(json const& spec, Eigen::MatrixXd const& sigma, Eigen::MatrixXd const& sigma0);

GridSpec grid_from_json(json const& doc);

/// {"kind":"constant_fraction","D":d} or {"kind":"table","stakes":[...]}
/// where stakes are fractions of wealth per history node (breadth-first).
/// `branching` is the market's outcome count, used by table strategies.
Strategy strategy_from_json(json const& doc, std::size_t branching);

json read_json_file(std::filesystem::path const& path);

/// Finite doubles as numbers, NaN and infinities as null.
json number(double x);

json to_json(DiscreteMarket const& market);
json to_json(GridSpec const& spec);
json to_json(ConditionReport const& report);
json to_json(FeasibilityResult const& result);
json to_json(AlphaValue const& alpha);
json to_json(Strategy const& strategy);
json to_json(ExactResult const& result);
json to_json(SimulationReport const& report);
json to_json(DriftReport const& report);
json to_json(Trajectory const& trajectory);
json to_json(std::span<const SweepPoint> sweep);

/// Pretty-printed; doubles use the shortest form that round-trips exactly.
std::string dump(json const& doc);

}  // namespace wkelly
