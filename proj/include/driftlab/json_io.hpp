#pragma once

#include <string>

#include <json.hpp>

#include "driftlab/drift.hpp"
#include "driftlab/engine.hpp"
#include "driftlab/experiments.hpp"
#include "driftlab/fitness.hpp"

namespace driftlab {

using nlohmann::json;

inline fitness_kind fitness_kind_from_name(const std::string& name) {
    if (name == "onemax") return fitness_kind::one_max;
    if (name == "binval") return fitness_kind::bin_val;
    if (name == "linear") return fitness_kind::linear;
    if (name == "nonlinear") return fitness_kind::nonlinear_example;
    if (name == "table") return fitness_kind::table;
    throw config_error("unknown fitness kind '" + name + "'");
}

inline fitness_spec fitness_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw config_error("fitness description needs a \"kind\" field");
    fitness_spec spec;
    spec.kind = fitness_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("weights")) {
        for (const auto& w : j.at("weights")) {
            if (!w.is_number_unsigned() && !w.is_number_integer())
                throw config_error("linear weights must be positive integers");
            const auto value = w.get<std::int64_t>();
            if (value <= 0) throw config_error("linear weights must be positive integers");
            spec.weights.push_back(static_cast<std::uint64_t>(value));
        }
    }
    if (j.contains("values"))
        for (const auto& [literal, value] : j.at("values").items())
            spec.table_values[literal] = value.get<double>();
    if (j.contains("n")) spec.n = j.at("n").get<int>();
    if (spec.n == 0) spec.n = spec.default_n();
    if (spec.n <= 0) throw config_error("fitness description needs n (or weights/values fixing it)");
    return spec;
}

inline json fitness_spec_to_json(const fitness_spec& spec) {
    json j;
    switch (spec.kind) {
        case fitness_kind::one_max: j["kind"] = "onemax"; break;
        case fitness_kind::bin_val: j["kind"] = "binval"; break;
        case fitness_kind::linear: j["kind"] = "linear"; break;
        case fitness_kind::nonlinear_example: j["kind"] = "nonlinear"; break;
        case fitness_kind::table: j["kind"] = "table"; break;
    }
    j["n"] = spec.default_n();
    if (!spec.weights.empty()) j["weights"] = spec.weights;
    if (!spec.table_values.empty()) j["values"] = spec.table_values;
    return j;
}

inline json to_json(const fitness_value& value) {
    if (std::holds_alternative<std::uint64_t>(value)) return std::get<std::uint64_t>(value);
    return std::get<double>(value);
}

inline json to_json(const run_record& record) {
    json j{{"generations", record.generations},
           {"evaluations", record.evaluations},
           {"seed", record.seed},
           {"hit_optimum", record.hit_optimum}};
    if (!record.trajectory.empty()) {
        json steps = json::array();
        for (const auto& x : record.trajectory) steps.push_back(x.to_string());
        j["trajectory"] = steps;
    }
    return j;
}

inline json to_json(const batch_stats& stats) {
    return {{"runs", stats.runs},
            {"mean_generations", stats.mean_generations},
            {"mean_evaluations", stats.mean_evaluations},
            {"std_error_generations", stats.std_error_generations},
            {"std_error_evaluations", stats.std_error_evaluations},
            {"timeout_count", stats.timeout_count}};
}

inline json to_json(const property_report& report) {
    json j{{"holds", report.holds}};
    if (!report.holds) {
        j["condition"] = report.condition_id;
        j["detail"] = report.detail;
        json witness = json::array();
        for (const auto& x : report.witness) witness.push_back(x.to_string());
        j["witness"] = witness;
    }
    return j;
}

inline json to_json(const bound_report& report) {
    return {{"direction", report.upper ? "upper" : "lower"},
            {"variant", report.variant == bound_variant::pointwise ? "pointwise" : "average"},
            {"applicable", report.applicable},
            {"c", report.c},
            {"d_init", report.d_init},
            {"bound", report.bound},
            {"exact_g", report.exact_g},
            {"slack", report.slack},
            {"satisfied", report.satisfied},
            {"horizon_used", report.horizon_used}};
}

inline json to_json(const lemma_report& report) {
    json j{{"fitness", report.fitness_name},
           {"n", report.n},
           {"N", report.population_size},
           {"drift_nonnegative", report.drift_nonnegative},
           {"min_drift", report.min_drift},
           {"left_heavy_positive", report.left_heavy_positive},
           {"left_heavy_count", report.left_heavy_count},
           {"min_drift_left_heavy", report.min_drift_left_heavy},
           {"claimed_left_heavy_lower", report.claimed_left_heavy_lower},
           {"max_negative_ratio", report.max_negative_ratio},
           {"claimed_negative_ratio_bound", report.claimed_negative_ratio_bound}};
    if (report.min_drift_piecewise) {
        j["min_drift_piecewise"] = *report.min_drift_piecewise;
        j["claimed_piecewise_lower"] = report.claimed_piecewise_lower;
    }
    return j;
}

inline json to_json(const cutoff_estimate_result& result) {
    json curve = json::array();
    for (const auto& point : result.curve)
        curve.push_back({{"N", point.population_size},
                         {"mean_evaluations", point.mean_evaluations},
                         {"stderr_evaluations", point.stderr_evaluations},
                         {"timeouts", point.timeout_count}});
    json j{{"n", result.n},
           {"C", result.slack_factor},
           {"runtime_1", result.runtime_single},
           {"curve", curve}};
    if (result.cutoff_population) j["N_star"] = *result.cutoff_population;
    return j;
}

inline json to_json(const invariant_report& report) {
    json rows = json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"t", row.t},
                        {"p_left", row.p_left},
                        {"p_right", row.p_right},
                        {"p_tie", row.p_tie},
                        {"p_optimal", row.p_optimal},
                        {"bit_marginals", row.bit_marginals},
                        {"side_flag", row.side_flag},
                        {"marginal_flag", row.marginal_flag}});
    return {{"exact", report.exact}, {"flag_count", report.flag_count}, {"rows", rows}};
}

} // namespace driftlab
