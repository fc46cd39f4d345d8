#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftlab/json_io.hpp"

namespace driftlab {

namespace cli_detail {

struct options {
    std::string config_path;
    std::string out_path;
    std::string export_model_path;
    std::string fitness_name;
    std::string distance_name;
    std::string suite;
    std::string mode_name;
    std::vector<std::uint64_t> weights;
    int n = 0;
    int N = 0;
    std::vector<int> n_grid;
    std::vector<int> N_grid;
    std::uint64_t replicates = 0;
    std::uint64_t horizon = 0;
    std::uint64_t max_generations = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double slack_factor = 0.0;
    bool no_timestamp = false;

    json config; // parsed --config file, empty object when absent
};

inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw config_error("config file must hold a JSON object");
    return j;
}

template <typename T>
void fill_from_config(const json& config, const char* key, T& value, bool already_set) {
    if (!already_set && config.contains(key)) value = config.at(key).get<T>();
}

inline fitness_spec resolve_fitness(const options& opt, bool need_n = true) {
    fitness_spec spec;
    if (!opt.fitness_name.empty()) {
        spec.kind = fitness_kind_from_name(opt.fitness_name);
        spec.weights = opt.weights;
        spec.n = opt.n;
        if (spec.n == 0) spec.n = spec.default_n();
        if (spec.kind == fitness_kind::table) {
            if (!opt.config.contains("fitness"))
                throw config_error("table functions are described in the config file");
            spec = fitness_spec_from_json(opt.config.at("fitness"));
        }
    } else if (opt.config.contains("fitness")) {
        spec = fitness_spec_from_json(opt.config.at("fitness"));
        if (opt.n != 0) spec.n = opt.n;
    } else {
        throw config_error("no fitness function given (use --fitness or a config file)");
    }
    if (need_n && spec.n <= 0) throw config_error("fitness function needs n (or an n grid)");
    return spec;
}

inline distance_kind resolve_distance(const std::string& name) {
    if (name.empty() || name == "unit") return distance_kind::unit;
    if (name == "harmonic") return distance_kind::harmonic;
    if (name == "upper") return distance_kind::upper;
    if (name == "piecewise") return distance_kind::piecewise;
    throw config_error("unknown distance kind '" + name + "'");
}

inline experiment_mode resolve_mode(const std::string& name) {
    if (name.empty() || name == "both") return experiment_mode::both;
    if (name == "simulate") return experiment_mode::simulate;
    if (name == "oracle") return experiment_mode::oracle;
    throw config_error("unknown mode '" + name + "'");
}

inline void write_output(const options& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw config_error("cannot open output file '" + opt.out_path + "'");
    out << text;
}

inline transition_model build_oracle_model(const fitness_function& f, int N) {
    if (f.kind() == fitness_kind::one_max && f.n() > oracle_full_cap)
        return build_lumped_one_max_model(f.n(), N);
    return build_model(f, N);
}

inline int run_command(const options& opt) {
    const fitness_spec spec = resolve_fitness(opt);
    const fitness_function f = spec.instantiate(spec.n);
    const int N = opt.N > 0 ? opt.N : 1;
    const std::uint64_t replicates = opt.replicates > 0 ? opt.replicates : 1000;
    ea_config cfg{f, N, opt.max_generations, false, std::nullopt};
    const batch_stats stats = batch_run(cfg, replicates, opt.seed);
    json j = to_json(stats);
    j["fitness"] = fitness_spec_to_json(spec);
    j["N"] = N;
    j["seed"] = opt.seed;
    write_output(opt, j.dump(2));
    return 0;
}

inline int oracle_command(const options& opt) {
    const fitness_spec spec = resolve_fitness(opt);
    const fitness_function f = spec.instantiate(spec.n);
    const int N = opt.N > 0 ? opt.N : 1;
    const transition_model model = build_oracle_model(f, N);
    const hitting_time_table table = exact_hitting_time(model);

    std::ostringstream csv;
    const bool with_drift = !opt.distance_name.empty();
    if (with_drift) {
        const distance_function d = make_distance(resolve_distance(opt.distance_name), f.n(), N);
        const auto distances = state_distances(model, d);
        csv << "state,level,g,drift,drift_plus,drift_minus\n";
        for (std::uint32_t s = 0; s < model.state_count; ++s) {
            csv << model.state_label(s) << ',' << model.state_level[s] << ','
                << detail::format_double(table.expected_generations[s]);
            if (model.absorbing[s]) {
                csv << ",,,\n";
            } else {
                const pointwise_drift drift = exact_pointwise_drift(model, s, distances);
                csv << ',' << detail::format_double(drift.total) << ','
                    << detail::format_double(drift.positive) << ','
                    << detail::format_double(drift.negative) << '\n';
            }
        }
    } else {
        std::ostringstream plain;
        export_hitting_csv(model, table, plain);
        csv << plain.str();
    }
    csv << "# g_uniform," << detail::format_double(table.uniform_average) << '\n';
    write_output(opt, csv.str());

    if (!opt.export_model_path.empty()) {
        std::ofstream out(opt.export_model_path, std::ios::binary);
        if (!out) throw config_error("cannot open model export file '" + opt.export_model_path + "'");
        export_model_csv(model, out);
    }
    return 0;
}

inline int check_fitness_command(const options& opt) {
    const fitness_spec spec = resolve_fitness(opt);
    const fitness_function f = spec.instantiate(spec.n);
    json j{{"fitness", fitness_spec_to_json(spec)}};
    j["monotonic"] = to_json(check_monotonic(f));
    j["linear_like"] = to_json(check_linear_like(f));
    write_output(opt, j.dump(2));
    return 0; // a negative finding is a result, not a tool failure
}

inline int verify_command(const options& opt) {
    const fitness_spec spec = resolve_fitness(opt);
    const fitness_function f = spec.instantiate(spec.n);
    const int N = opt.N > 0 ? opt.N : 1;
    const std::string suite = opt.suite.empty() ? "all" : opt.suite;
    const std::uint64_t horizon = opt.horizon > 0 ? opt.horizon : 1000000;

    json results = json::object();
    bool failed = false;
    const auto run_theorem = [&](const std::string& name, bool upper, bound_variant variant) {
        const transition_model model = build_model(f, N);
        const distance_function d = make_distance(resolve_distance(opt.distance_name), f.n(), N);
        const bound_report report = upper ? verify_upper_bound_theorem(model, d, variant, horizon)
                                          : verify_lower_bound_theorem(model, d, variant, horizon);
        results[name] = to_json(report);
        if (report.applicable && !report.satisfied) failed = true;
    };

    if (suite == "theorem1" || suite == "all") run_theorem("theorem1", true, bound_variant::pointwise);
    if (suite == "theorem2" || suite == "all") run_theorem("theorem2", false, bound_variant::pointwise);
    if (suite == "theorem3" || suite == "all") run_theorem("theorem3", true, bound_variant::average);
    if (suite == "theorem4" || suite == "all") run_theorem("theorem4", false, bound_variant::average);
    if (suite == "theorem6" || suite == "all") {
        const explicit_bound_check check = check_theorem6_bound(f, N);
        results["theorem6"] = {{"exact_g", check.exact_g},
                               {"d_init", check.d_init},
                               {"bound", check.bound},
                               {"satisfied", check.satisfied}};
        if (!check.satisfied) failed = true;
    }
    if (suite == "lemma5" || suite == "lemma8" || suite == "all") {
        if (suite == "lemma8" && f.kind() != fitness_kind::one_max)
            throw config_error("the lemma8 suite applies to the onemax function");
        const lemma_report report = verify_lemma_inequalities(f, N);
        results[suite == "lemma8" ? "lemma8" : "lemma5"] = to_json(report);
        if (!report.hard_assertions_hold()) failed = true;
    }
    if (results.empty()) throw config_error("unknown suite '" + suite + "'");

    write_output(opt, results.dump(2));
    return failed ? 1 : 0;
}

inline int scaling_command(const options& opt) {
    experiment_config cfg;
    cfg.fitness = resolve_fitness(opt, opt.n_grid.empty());
    cfg.n_grid = !opt.n_grid.empty() ? opt.n_grid : std::vector<int>{cfg.fitness.default_n()};
    cfg.N_grid = !opt.N_grid.empty() ? opt.N_grid : std::vector<int>{opt.N > 0 ? opt.N : 1};
    if (opt.replicates > 0) cfg.replicates = opt.replicates;
    cfg.master_seed = opt.seed;
    cfg.mode = resolve_mode(opt.mode_name);
    cfg.max_generations = opt.max_generations;
    cfg.timestamp_header = !opt.no_timestamp;

    std::ostringstream csv;
    scaling_experiment(cfg, csv);
    write_output(opt, csv.str());
    return 0;
}

inline int cutoff_command(const options& opt) {
    const fitness_spec spec = resolve_fitness(opt);
    const fitness_function f = spec.instantiate(spec.n);
    if (opt.N_grid.empty()) throw config_error("cutoff needs an N grid (--N-grid or config)");
    const double C = opt.slack_factor > 0.0 ? opt.slack_factor : 2.0;
    const std::uint64_t replicates = opt.replicates > 0 ? opt.replicates : 1000;
    const cutoff_estimate_result result =
        cutoff_estimate(f, opt.N_grid, C, replicates, opt.seed, opt.max_generations);
    json j = to_json(result);
    j["fitness"] = fitness_spec_to_json(spec);
    write_output(opt, j.dump(2));
    return 0;
}

inline int invariants_command(const options& opt) {
    const fitness_spec spec = resolve_fitness(opt);
    const fitness_function f = spec.instantiate(spec.n);
    const int N = opt.N > 0 ? opt.N : 1;
    const std::uint64_t horizon = opt.horizon > 0 ? opt.horizon : 100;
    const std::uint64_t replicates = opt.replicates > 0 ? opt.replicates : 100000;
    const invariant_report report = invariant_distribution_check(f, N, horizon, replicates, opt.seed);
    json j = to_json(report);
    j["fitness"] = fitness_spec_to_json(spec);
    j["N"] = N;
    write_output(opt, j.dump(2));
    return report.flag_count == 0 ? 0 : 1;
}

} // namespace cli_detail

/// Entry point behind the command-line tool. Exit codes: 0 success (including
/// negative findings), 1 failed verification suite, 2 configuration error.
inline int cli_main(int argc, const char* const* argv) {
    using namespace cli_detail;
    options opt;

    CLI::App app{"Runtime-analysis laboratory for elitist (1+N) evolutionary algorithms"};
    app.require_subcommand(1);

    const auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "JSON config file");
        cmd->add_option("--seed", opt.seed, "master seed")->each([&opt](const std::string&) {
            opt.seed_set = true;
        });
        cmd->add_option("--out", opt.out_path, "output file (default: stdout)");
        cmd->add_option("--fitness,--kind", opt.fitness_name,
                        "fitness kind: onemax|binval|linear|nonlinear|table");
        cmd->add_option("--weights", opt.weights, "linear weights")->delimiter(',');
        cmd->add_option("--n", opt.n, "bit-string length");
        cmd->add_option("--N", opt.N, "population size (children per generation)");
        cmd->add_option("--max-generations", opt.max_generations, "safety cap (0 = default)");
    };

    CLI::App* run = app.add_subcommand("run", "batch-simulate the (1+N) EA");
    add_common(run);
    run->add_option("--replicates", opt.replicates, "number of runs");

    CLI::App* oracle = app.add_subcommand("oracle", "exact hitting times and drift tables");
    add_common(oracle);
    oracle->add_option("--distance", opt.distance_name, "distance kind for drift columns");
    oracle->add_option("--export-model", opt.export_model_path, "write the sparse transition model");

    CLI::App* verify = app.add_subcommand("verify", "drift-theorem and lemma suites");
    add_common(verify);
    verify->add_option("--suite", opt.suite,
                       "theorem1|theorem2|theorem3|theorem4|theorem6|lemma5|lemma8|all");
    verify->add_option("--distance", opt.distance_name, "distance kind (default unit)");
    verify->add_option("--horizon", opt.horizon, "average-drift scan horizon");

    CLI::App* check = app.add_subcommand("check-fitness", "monotonicity and linear-likeness report");
    add_common(check);

    CLI::App* scaling = app.add_subcommand("scaling", "grid sweep emitting the scaling CSV");
    add_common(scaling);
    scaling->add_option("--n-grid", opt.n_grid, "bit-string lengths")->delimiter(',');
    scaling->add_option("--N-grid", opt.N_grid, "population sizes")->delimiter(',');
    scaling->add_option("--replicates", opt.replicates, "runs per grid cell");
    scaling->add_option("--mode", opt.mode_name, "simulate|oracle|both");
    scaling->add_flag("--no-header-timestamp", opt.no_timestamp, "suppress the timestamp comment");

    CLI::App* cutoff = app.add_subcommand("cutoff", "estimate the population-size cut-off point");
    add_common(cutoff);
    cutoff->add_option("--N-grid", opt.N_grid, "population sizes (must contain 1)")->delimiter(',');
    cutoff->add_option("--replicates", opt.replicates, "runs per population size");
    cutoff->add_option("--C", opt.slack_factor, "slack factor (default 2)");

    CLI::App* invariants = app.add_subcommand("invariants", "distribution-invariant checks");
    add_common(invariants);
    invariants->add_option("--horizon", opt.horizon, "generations to track (default 100)");
    invariants->add_option("--replicates", opt.replicates, "Monte Carlo replicates above the oracle cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!opt.config_path.empty()) {
            opt.config = load_config(opt.config_path);
            if (opt.n == 0) fill_from_config(opt.config, "n", opt.n, false);
            if (opt.N == 0) fill_from_config(opt.config, "N", opt.N, false);
            if (opt.n_grid.empty()) fill_from_config(opt.config, "n_grid", opt.n_grid, false);
            if (opt.N_grid.empty()) fill_from_config(opt.config, "N_grid", opt.N_grid, false);
            if (opt.replicates == 0) fill_from_config(opt.config, "replicates", opt.replicates, false);
            if (opt.horizon == 0) fill_from_config(opt.config, "horizon", opt.horizon, false);
            if (opt.max_generations == 0)
                fill_from_config(opt.config, "max_generations", opt.max_generations, false);
            if (!opt.seed_set) fill_from_config(opt.config, "seed", opt.seed, false);
            if (opt.slack_factor == 0.0) fill_from_config(opt.config, "C", opt.slack_factor, false);
            fill_from_config(opt.config, "mode", opt.mode_name, !opt.mode_name.empty());
            fill_from_config(opt.config, "distance", opt.distance_name, !opt.distance_name.empty());
            fill_from_config(opt.config, "suite", opt.suite, !opt.suite.empty());
            fill_from_config(opt.config, "out", opt.out_path, !opt.out_path.empty());
            if (opt.config.contains("timestamp") && !opt.no_timestamp)
                opt.no_timestamp = !opt.config.at("timestamp").get<bool>();
        } else {
            opt.config = json::object();
        }

        if (app.got_subcommand(run)) return run_command(opt);
        if (app.got_subcommand(oracle)) return oracle_command(opt);
        if (app.got_subcommand(verify)) return verify_command(opt);
        if (app.got_subcommand(check)) return check_fitness_command(opt);
        if (app.got_subcommand(scaling)) return scaling_command(opt);
        if (app.got_subcommand(cutoff)) return cutoff_command(opt);
        if (app.got_subcommand(invariants)) return invariants_command(opt);
    } catch (const not_linear_like& e) {
        std::cerr << "verification precondition failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace driftlab
