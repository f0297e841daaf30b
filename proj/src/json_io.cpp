// Copyright 2026 The weighted-kelly Authors
// SPDX-License-Identifier: Apache-2.0
#include "wkelly/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wkelly/error.hpp"

namespace wkelly {

namespace {

[[noreturn]] void schema_error(std::string const& what) { throw Error(ErrorCode::SchemaError, what); }

void allow_keys(json const& obj, std::set<std::string> const& allowed, std::string const& where)
{
    for (auto const& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            schema_error(where + ": unknown member \"" + key + "\"");
        }
    }
}

json const& member(json const& obj, char const* key, std::string const& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) {
        schema_error(where + ": missing member \"" + key + "\"");
    }
    return *it;
}

double as_number(json const& v, std::string const& where)
{
    if (!v.is_number()) {
        schema_error(where + ": expected a number");
    }
    return v.get<double>();
}

std::vector<double> as_numbers(json const& v, std::string const& where)
{
    if (!v.is_array()) {
        schema_error(where + ": expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (auto const& x : v) {
        out.push_back(as_number(x, where));
    }
    return out;
}

std::size_t as_count(json const& v, std::string const& where)
{
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        schema_error(where + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

Eigen::MatrixXd as_matrix(json const& v, std::size_t dim, std::string const& where)
{
    auto const d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd m(d, d);
    if (v.is_number() && dim == 1) {
        m(0, 0) = v.get<double>();
        return m;
    }
    if (!v.is_array() || v.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch, where + ": expected " + std::to_string(dim) + " rows");
    }
    for (Eigen::Index r = 0; r < d; ++r) {
        auto const row = as_numbers(v[static_cast<std::size_t>(r)], where);
        if (row.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, where + ": expected " + std::to_string(dim) + " columns");
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = row[static_cast<std::size_t>(c)];
        }
    }
    return m;
}

json numbers_json(std::span<const double> xs)
{
    json out = json::array();
    for (double x : xs) {
        out.push_back(number(x));
    }
    return out;
}

}  // namespace

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json read_json_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (json::parse_error const& e) {
        schema_error(path.string() + ": " + e.what());
    }
}

//---------------------------------------------------------------------------//
// Catalog functions
//---------------------------------------------------------------------------//

PointFunction weight_from_json(json const& spec, std::size_t dim)
{
    std::string const where = "weight";
    if (spec.is_string()) {
        if (spec.get<std::string>() == "one") {
            return PointFunction::constant(1.0);
        }
        schema_error(where + ": unknown weight \"" + spec.get<std::string>() + "\"");
    }
    if (spec.is_number()) {
        double const c = spec.get<double>();
        if (c < 0.0) {
            throw Error(ErrorCode::NegativeWeight, "constant weight is negative");
        }
        return PointFunction::constant(c);
    }
    if (!spec.is_object()) {
        schema_error(where + ": expected \"one\", a number or an object");
    }
    auto const kind = member(spec, "kind", where);
    if (!kind.is_string()) {
        schema_error(where + ": \"kind\" must be a string");
    }
    std::string const k = kind.get<std::string>();
    if (k == "constant") {
        allow_keys(spec, {"kind", "value"}, where);
        double const c = as_number(member(spec, "value", where), where);
        if (c < 0.0) {
            throw Error(ErrorCode::NegativeWeight, "constant weight is negative");
        }
        return PointFunction::constant(c);
    }
    if (k == "polynomial") {
        allow_keys(spec, {"kind", "coeffs", "coord"}, where);
        auto coeffs = as_numbers(member(spec, "coeffs", where), where);
        std::size_t const coord = spec.contains("coord") ? as_count(spec["coord"], where) : 0;
        if (coord >= dim) {
            throw Error(ErrorCode::DimensionMismatch, where + ": coord out of range");
        }
        return PointFunction(
            [coeffs, coord](Point const& x) {
                double v = 0.0;
                double const t = x(static_cast<Eigen::Index>(coord));
                for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
                    v = v * t + *it;
                }
                if (v < 0.0) {
                    throw Error(ErrorCode::NegativeWeight, "polynomial weight is negative at a node");
                }
                return v;
            },
            "polynomial");
    }
    if (k == "box") {
        allow_keys(spec, {"kind", "lower", "upper", "inside", "outside"}, where);
        auto lower = as_numbers(member(spec, "lower", where), where);
        auto upper = as_numbers(member(spec, "upper", where), where);
        if (lower.size() != dim || upper.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, where + ": box bounds must have one entry per dimension");
        }
        double const inside = spec.contains("inside") ? as_number(spec["inside"], where) : 1.0;
        double const outside = spec.contains("outside") ? as_number(spec["outside"], where) : 0.0;
        if (inside < 0.0 || outside < 0.0) {
            throw Error(ErrorCode::NegativeWeight, "box weight values must be non-negative");
        }
        return PointFunction(
            [lower, upper, inside, outside](Point const& x) {
                for (std::size_t i = 0; i < lower.size(); ++i) {
                    double const t = x(static_cast<Eigen::Index>(i));
                    if (t < lower[i] || t > upper[i]) {
                        return outside;
                    }
                }
                return inside;
            },
            "box");
    }
    schema_error(where + ": unknown kind \"" + k + "\"");
}

PointFunction return_from_json(json const& spec, Eigen::MatrixXd const& sigma, Eigen::MatrixXd const& sigma0)
{
    std::string const where = "return";
    if (!spec.is_object()) {
        schema_error(where + ": expected an object");
    }
    auto const form = member(spec, "form", where);
    if (!form.is_string()) {
        schema_error(where + ": \"form\" must be a string");
    }
    std::string const f = form.get<std::string>();
    if (f == "martingale") {
        allow_keys(spec, {"form", "D"}, where);
        return construct_return_gaussian(sigma, sigma0, as_number(member(spec, "D", where), where));
    }
    if (f == "linear") {
        allow_keys(spec, {"form", "coeffs"}, where);
        auto const coeffs = as_numbers(member(spec, "coeffs", where), where);
        if (coeffs.size() != static_cast<std::size_t>(sigma.rows())) {
            throw Error(ErrorCode::DimensionMismatch, where + ": one coefficient per dimension");
        }
        Eigen::VectorXd const a = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), sigma.rows());
        return PointFunction([a](Point const& x) { return a.dot(x); }, "linear");
    }
    if (f == "constant") {
        allow_keys(spec, {"form", "value"}, where);
        double const c = as_number(member(spec, "value", where), where);
        return PointFunction([c](Point const&) { return c; }, "constant");
    }
    schema_error(where + ": unknown form \"" + f + "\"");
}

GridSpec grid_from_json(json const& doc)
{
    std::string const where = "grid";
    if (!doc.is_object()) {
        schema_error(where + ": expected an object");
    }
    allow_keys(doc, {"scheme", "K", "R", "tolerance"}, where);
    GridSpec spec;
    if (doc.contains("scheme")) {
        auto const s = doc["scheme"];
        if (s == "tensor") {
            spec.scheme = QuadratureScheme::tensor;
        } else if (s == "gaussian") {
            spec.scheme = QuadratureScheme::gaussian;
        } else {
            schema_error(where + ": scheme must be \"tensor\" or \"gaussian\"");
        }
    }
    if (doc.contains("K")) {
        spec.nodes = as_count(doc["K"], where + ".K");
    }
    if (doc.contains("R")) {
        spec.radius = as_number(doc["R"], where + ".R");
    }
    if (doc.contains("tolerance")) {
        spec.tolerance = as_number(doc["tolerance"], where + ".tolerance");
    }
    validate(spec);
    return spec;
}

//---------------------------------------------------------------------------//
// Markets and strategies
//---------------------------------------------------------------------------//

LoadedMarket market_from_json(json const& doc)
{
    if (!doc.is_object()) {
        schema_error("market: expected an object");
    }
    auto const type = member(doc, "type", "market");
    if (type == "discrete") {
        allow_keys(doc, {"type", "outcomes", "probs", "weights", "reference", "distinct_outcomes", "grid"}, "market");
        auto outcomes = as_numbers(member(doc, "outcomes", "market"), "market.outcomes");
        auto probs = as_numbers(member(doc, "probs", "market"), "market.probs");
        auto weights = doc.contains("weights") ? as_numbers(doc["weights"], "market.weights")
                                               : std::vector<double>(outcomes.size(), 1.0);
        auto reference = doc.contains("reference") ? as_numbers(doc["reference"], "market.reference")
                                                   : uniform_reference(outcomes.size());
        bool distinct = false;
        if (doc.contains("distinct_outcomes")) {
            if (!doc["distinct_outcomes"].is_boolean()) {
                schema_error("market.distinct_outcomes: expected a boolean");
            }
            distinct = doc["distinct_outcomes"].get<bool>();
        }
        GridSpec grid = doc.contains("grid") ? grid_from_json(doc["grid"]) : GridSpec{};
        return {build_discrete_market(std::move(outcomes), std::move(probs), std::move(weights), std::move(reference),
                                      distinct ? OutcomeIdentity::by_value : OutcomeIdentity::by_index),
                grid};
    }
    if (type == "gaussian") {
        allow_keys(doc, {"type", "dim", "sigma", "sigma0", "weight", "return", "grid"}, "market");
        std::size_t const dim = as_count(member(doc, "dim", "market"), "market.dim");
        if (dim == 0) {
            throw Error(ErrorCode::DimensionMismatch, "market.dim must be positive");
        }
        Eigen::MatrixXd sigma = as_matrix(member(doc, "sigma", "market"), dim, "market.sigma");
        Eigen::MatrixXd sigma0 = as_matrix(member(doc, "sigma0", "market"), dim, "market.sigma0");
        PointFunction weight = doc.contains("weight") ? weight_from_json(doc["weight"], dim)
                                                      : PointFunction::constant(1.0);
        PointFunction returns = return_from_json(member(doc, "return", "market"), sigma, sigma0);
        GridSpec grid = doc.contains("grid") ? grid_from_json(doc["grid"]) : GridSpec{};
        return {build_gaussian_market(dim, std::move(sigma), std::move(sigma0), std::move(weight), std::move(returns)),
                grid};
    }
    schema_error("market: \"type\" must be \"discrete\" or \"gaussian\"");
}

LoadedMarket load_market(std::filesystem::path const& path) { return market_from_json(read_json_file(path)); }

Strategy strategy_from_json(json const& doc, std::size_t branching)
{
    std::string const where = "strategy";
    if (!doc.is_object()) {
        schema_error(where + ": expected an object");
    }
    auto const kind = member(doc, "kind", where);
    if (kind == "constant_fraction") {
        allow_keys(doc, {"kind", "D"}, where);
        return Strategy::constant_fraction(as_number(member(doc, "D", where), where + ".D"));
    }
    if (kind == "table") {
        allow_keys(doc, {"kind", "stakes", "branching"}, where);
        std::size_t const b = doc.contains("branching") ? as_count(doc["branching"], where + ".branching") : branching;
        return Strategy::table(as_numbers(member(doc, "stakes", where), where + ".stakes"), b);
    }
    schema_error(where + ": \"kind\" must be \"constant_fraction\" or \"table\"");
}

//---------------------------------------------------------------------------//
// Reports
//---------------------------------------------------------------------------//

json to_json(DiscreteMarket const& market)
{
    return {{"type", "discrete"},
            {"outcomes", numbers_json(market.outcomes())},
            {"probs", numbers_json(market.probs())},
            {"weights", numbers_json(market.weights())},
            {"reference", numbers_json(market.reference())}};
}

json to_json(GridSpec const& spec)
{
    return {{"scheme", std::string(to_string(spec.scheme))},
            {"K", spec.nodes},
            {"R", spec.radius},
            {"tolerance", spec.tolerance}};
}

json to_json(ConditionReport const& r)
{
    json out = {{"orthogonality_residual", number(r.orthogonality_residual)},
                {"orthogonality_error", number(r.orthogonality_error)},
                {"orthogonality_passed", r.orthogonality_passed},
                {"mass_lhs", number(r.mass_lhs)},
                {"mass_rhs", number(r.mass_rhs)},
                {"mass_error", number(r.mass_error)},
                {"mass_passed", r.mass_passed},
                {"passed", r.passed()},
                {"tolerance_used", r.tolerance_used},
                {"reference_total", number(r.reference_total)},
                {"reference_normalized", std::abs(r.reference_total - 1.0) <= r.tolerance_used}};
    out["product_kernel_residual"] = r.product_kernel_residual ? number(*r.product_kernel_residual) : json(nullptr);
    return out;
}

json to_json(FeasibilityResult const& r)
{
    return {{"feasible", r.feasible},
            {"D", r.D ? number(*r.D) : json(nullptr)},
            {"per_outcome_D", numbers_json(r.per_outcome_D)},
            {"max_spread", number(r.max_spread)},
            {"tolerance_used", r.tolerance_used},
            {"reason", r.reason}};
}

json to_json(AlphaValue const& a)
{
    return {{"value", number(a.value)},
            {"method", std::string(to_string(a.method))},
            {"error_estimate", number(a.error_estimate)}};
}

json to_json(Strategy const& s)
{
    switch (s.kind()) {
    case Strategy::Kind::constant_fraction: return {{"kind", "constant_fraction"}, {"D", *s.fraction()}};
    case Strategy::Kind::table:
        return {{"kind", "table"}, {"stakes", numbers_json(s.table_fractions())}, {"branching", s.branching()}};
    case Strategy::Kind::custom: return {{"kind", "custom"}, {"label", s.label()}};
    }
    return nullptr;
}

json to_json(ExactResult const& r)
{
    json out = {{"expected_rate", number(r.expected_rate)},
                {"n", r.n},
                {"sequences_enumerated", r.sequences_enumerated},
                {"alpha", number(r.alpha)},
                {"alpha_times_n", number(static_cast<double>(r.n) * r.alpha)},
                {"supermartingale_gap", number(r.supermartingale_gap)}};
    if (r.per_node_drifts) {
        json nodes = json::array();
        for (auto const& [prefix, drift] : *r.per_node_drifts) {
            nodes.push_back({{"prefix", prefix}, {"drift", number(drift)}});
        }
        out["per_node_drifts"] = nodes;
    }
    return out;
}

json to_json(SimulationReport const& r)
{
    return {{"paths", r.paths},
            {"n", r.n},
            {"mean_S_n", number(r.mean_S_n)},
            {"std_error", number(r.std_error)},
            {"alpha_times_n", number(r.alpha_times_n)},
            {"z_score", number(r.z_score)},
            {"seed", r.seed},
            {"ruin_count", r.ruin_count}};
}

json to_json(DriftReport const& r)
{
    json steps = json::array();
    for (auto const& s : r.steps) {
        steps.push_back({{"step", s.step},
                         {"mean", number(s.mean)},
                         {"std_error", number(s.std_error)},
                         {"z_score", number(s.z_score)}});
    }
    return {{"paths", r.paths}, {"seed", r.seed}, {"ruin_count", r.ruin_count}, {"alpha", number(r.alpha)},
            {"steps", steps}};
}

json to_json(Trajectory const& t)
{
    json out = {{"wealth", numbers_json(t.wealth)},
                {"rate", numbers_json(t.rate)},
                {"compensator", numbers_json(t.compensator)},
                {"stakes", numbers_json(t.stakes)}};
    json outcomes = json::array();
    for (auto const& o : t.outcomes) {
        outcomes.push_back(numbers_json(o));
    }
    out["outcomes"] = outcomes;
    return out;
}

json to_json(std::span<const SweepPoint> sweep)
{
    json out = json::array();
    for (auto const& p : sweep) {
        out.push_back({{"D", number(p.D)}, {"expected_rate", number(p.expected_rate)}, {"gap", number(p.gap)}});
    }
    return out;
}

std::string dump(json const& doc) { return doc.dump(2) + "\n"; }

}  // namespace wkelly
