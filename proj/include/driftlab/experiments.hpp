#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "driftlab/drift.hpp"
#include "driftlab/engine.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/fitness.hpp"
#include "driftlab/oracle.hpp"

namespace driftlab {

/// Re-instantiable description of a fitness function. Kinds whose shape is
/// determined by n alone can sweep an n grid; linear and table functions pin n.
struct fitness_spec {
    fitness_kind kind = fitness_kind::one_max;
    std::vector<std::uint64_t> weights;          // linear
    std::map<std::string, double> table_values;  // table
    int n = 0;                                   // required for onemax/binval/nonlinear

    fitness_function instantiate(int length) const {
        switch (kind) {
            case fitness_kind::one_max: return fitness_function::one_max(length);
            case fitness_kind::bin_val: return fitness_function::bin_val(length);
            case fitness_kind::nonlinear_example: return fitness_function::nonlinear_example(length);
            case fitness_kind::linear:
                if (length != static_cast<int>(weights.size()))
                    throw config_error("fitness_spec: linear weights fix n = " +
                                       std::to_string(weights.size()));
                return fitness_function::linear(weights);
            case fitness_kind::table:
                if (table_values.empty()) throw config_error("fitness_spec: table has no values");
                if (length != static_cast<int>(table_values.begin()->first.size()))
                    throw config_error("fitness_spec: table literals fix n");
                return fitness_function::table(length, table_values);
        }
        throw config_error("fitness_spec: unknown kind");
    }

    int default_n() const {
        if (kind == fitness_kind::linear) return static_cast<int>(weights.size());
        if (kind == fitness_kind::table && !table_values.empty())
            return static_cast<int>(table_values.begin()->first.size());
        return n;
    }
};

enum class experiment_mode { simulate, oracle, both };

inline std::string experiment_mode_name(experiment_mode mode) {
    switch (mode) {
        case experiment_mode::simulate: return "simulate";
        case experiment_mode::oracle: return "oracle";
        case experiment_mode::both: return "both";
    }
    return "?";
}

struct experiment_config {
    fitness_spec fitness;
    std::vector<int> n_grid;
    std::vector<int> N_grid;
    std::uint64_t replicates = 1000;
    std::uint64_t master_seed = 1;
    experiment_mode mode = experiment_mode::both;
    std::uint64_t max_generations = 0;
    bool timestamp_header = true;
};

namespace detail {

inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

// exact uniform-average hitting time; one-max goes through the level chain so
// large n stays reachable
inline double exact_uniform_hitting(const fitness_function& f, int N) {
    if (f.kind() == fitness_kind::one_max)
        return exact_hitting_time(build_lumped_one_max_model(f.n(), N)).uniform_average;
    return exact_hitting_time(build_model(f, N)).uniform_average;
}

inline std::optional<double> running_time_lower_bound(fitness_kind kind, int n, int N) {
    if (kind == fitness_kind::table) return std::nullopt;
    double lower = bound_formula(bound_formula_kind::one_max_lower, n, N);
    if (N > e_to_the_e)
        lower = std::max(lower, bound_formula(bound_formula_kind::one_max_lower_large_n, n, N));
    if (kind == fitness_kind::bin_val)
        lower = std::max(lower, bound_formula(bound_formula_kind::bin_val_lower, n, N));
    return lower;
}

inline std::optional<double> running_time_upper_bound(fitness_kind kind, int n, int N) {
    switch (kind) {
        case fitness_kind::one_max: return bound_formula(bound_formula_kind::one_max_upper, n, N);
        case fitness_kind::bin_val:
        case fitness_kind::linear:
        case fitness_kind::nonlinear_example:
            return bound_formula(bound_formula_kind::linear_like_upper, n, N);
        case fitness_kind::table: return std::nullopt;
    }
    return std::nullopt;
}

} // namespace detail

inline const char* scaling_csv_header =
    "fitness,n,N,mode,replicates,mean_gens,stderr_gens,mean_evals,stderr_evals,exact_g,"
    "bound_lower,bound_upper,seed";

/// One CSV row per (n, N) grid cell, in grid order. Identical config and seed
/// give byte-identical output; the timestamp line is a comment and can be
/// suppressed.
inline void scaling_experiment(const experiment_config& cfg, std::ostream& out) {
    if (cfg.n_grid.empty() || cfg.N_grid.empty())
        throw config_error("scaling_experiment: grids must be non-empty");
    if (cfg.replicates < 1 && cfg.mode != experiment_mode::oracle)
        throw config_error("scaling_experiment: need replicates >= 1");
    const bool wants_oracle = cfg.mode != experiment_mode::simulate;
    const bool wants_simulation = cfg.mode != experiment_mode::oracle;
    for (const int n : cfg.n_grid) {
        if (!wants_oracle) break;
        const bool lumpable = cfg.fitness.kind == fitness_kind::one_max;
        if (lumpable ? n > oracle_lumped_cap : n > oracle_full_cap)
            throw config_error("scaling_experiment: n = " + std::to_string(n) +
                               " exceeds the oracle cap for this fitness kind");
    }

    if (cfg.timestamp_header) {
        char stamp[64];
        const std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
        out << "# generated " << stamp << "\n";
    }
    out << scaling_csv_header << "\n";

    std::uint64_t cell = 0;
    for (const int n : cfg.n_grid) {
        const fitness_function f = cfg.fitness.instantiate(n);
        for (const int N : cfg.N_grid) {
            const std::uint64_t cell_seed = mix64(cfg.master_seed ^ mix64(cell + 1));
            ++cell;

            std::string mean_gens, stderr_gens, mean_evals, stderr_evals, exact_g;
            if (wants_simulation) {
                ea_config run_cfg{f, N, cfg.max_generations, false, std::nullopt};
                const batch_stats stats = batch_run(run_cfg, cfg.replicates, cell_seed);
                mean_gens = detail::format_double(stats.mean_generations);
                stderr_gens = detail::format_double(stats.std_error_generations);
                mean_evals = detail::format_double(stats.mean_evaluations);
                stderr_evals = detail::format_double(stats.std_error_evaluations);
            }
            if (wants_oracle) exact_g = detail::format_double(detail::exact_uniform_hitting(f, N));

            const auto lower = detail::running_time_lower_bound(cfg.fitness.kind, n, N);
            const auto upper = detail::running_time_upper_bound(cfg.fitness.kind, n, N);
            out << f.name() << ',' << n << ',' << N << ',' << experiment_mode_name(cfg.mode) << ','
                << cfg.replicates << ',' << mean_gens << ',' << stderr_gens << ',' << mean_evals << ','
                << stderr_evals << ',' << exact_g << ','
                << (lower ? detail::format_double(*lower) : std::string{}) << ','
                << (upper ? detail::format_double(*upper) : std::string{}) << ',' << cell_seed << "\n";
        }
    }
}

/// Largest population size whose mean running time stays within factor C of
/// the single-child configuration.
struct cutoff_estimate_result {
    int n = 0;
    double slack_factor = 0.0; // C
    double runtime_single = 0.0;
    std::optional<int> cutoff_population; // N*, absent if nothing qualified
    struct point {
        int population_size = 0;
        double mean_evaluations = 0.0;
        double stderr_evaluations = 0.0;
        std::uint64_t timeout_count = 0;
    };
    std::vector<point> curve;
};

inline cutoff_estimate_result cutoff_estimate(const fitness_function& f, const std::vector<int>& N_grid,
                                              double C, std::uint64_t replicates,
                                              std::uint64_t master_seed,
                                              std::uint64_t max_generations = 0) {
    if (std::find(N_grid.begin(), N_grid.end(), 1) == N_grid.end())
        throw config_error("cutoff_estimate: the population grid must contain 1");
    cutoff_estimate_result result;
    result.n = f.n();
    result.slack_factor = C;
    for (std::size_t i = 0; i < N_grid.size(); ++i) {
        const int N = N_grid[i];
        ea_config cfg{f, N, max_generations, false, std::nullopt};
        const batch_stats stats = batch_run(cfg, replicates, mix64(master_seed ^ mix64(i + 1)));
        result.curve.push_back({N, stats.mean_evaluations, stats.std_error_evaluations,
                                stats.timeout_count});
        if (N == 1) result.runtime_single = stats.mean_evaluations;
    }
    for (const auto& point : result.curve)
        if (point.mean_evaluations <= C * result.runtime_single)
            if (!result.cutoff_population || point.population_size > *result.cutoff_population)
                result.cutoff_population = point.population_size;
    return result;
}

/// Per-generation mass comparison of the strictly-left-heavy and strictly
/// right-heavy states plus the per-bit one-marginals. Ties carry no
/// directional information, so they are reported separately; with ties folded
/// into either side the uniform initialization itself would tip the scale.
struct invariant_row {
    std::uint64_t t = 0;
    double p_left = 0.0;     // strictly more ones in the left half, non-optimal
    double p_right = 0.0;    // strictly more ones in the right half, non-optimal
    double p_tie = 0.0;      // balanced non-optimal states
    double p_optimal = 0.0;
    std::vector<double> bit_marginals; // P(bit i = 1)
    bool side_flag = false;            // p_left < p_right beyond tolerance
    bool marginal_flag = false;        // marginals increase somewhere beyond tolerance
};

struct invariant_report {
    bool exact = true;
    std::uint64_t flag_count = 0;
    std::vector<invariant_row> rows;
};

namespace detail {

enum class strict_side { left, right, tie, optimal };

inline strict_side classify_strict(const bit_string& x) {
    if (x.is_all_ones()) return strict_side::optimal;
    const int left = x.ones_in_range(0, x.size() / 2);
    const int right = x.ones_count() - left;
    if (left > right) return strict_side::left;
    if (left < right) return strict_side::right;
    return strict_side::tie;
}

} // namespace detail

inline invariant_report invariant_distribution_check(const fitness_function& f, int N,
                                                     std::uint64_t horizon,
                                                     std::uint64_t mc_replicates = 100000,
                                                     std::uint64_t seed = 1) {
    const int n = f.n();
    if (n <= exhaustive_check_cap) {
        const property_report linear_like = check_linear_like(f);
        if (!linear_like.holds)
            throw not_linear_like("invariant_distribution_check: " + f.name() +
                                  " is not linear-like: " + linear_like.detail);
    }

    invariant_report report;
    constexpr double exact_tolerance = 1e-10;

    if (n <= oracle_full_cap) {
        const transition_model model = build_model(f, N);
        std::vector<detail::strict_side> side(model.state_count);
        for (std::uint32_t s = 0; s < model.state_count; ++s)
            side[s] = detail::classify_strict(bit_string::from_mask(n, s));

        state_distribution dist = uniform_init(model);
        for (std::uint64_t t = 0; t <= horizon; ++t) {
            invariant_row row;
            row.t = t;
            row.bit_marginals.assign(static_cast<std::size_t>(n), 0.0);
            for (std::uint32_t s = 0; s < model.state_count; ++s) {
                const double mass = dist.probs[s];
                if (mass == 0.0) continue;
                switch (side[s]) {
                    case detail::strict_side::left: row.p_left += mass; break;
                    case detail::strict_side::right: row.p_right += mass; break;
                    case detail::strict_side::tie: row.p_tie += mass; break;
                    case detail::strict_side::optimal: row.p_optimal += mass; break;
                }
                for (int i = 0; i < n; ++i)
                    if ((s >> i) & 1u) row.bit_marginals[static_cast<std::size_t>(i)] += mass;
            }
            row.side_flag = row.p_left < row.p_right - exact_tolerance;
            for (int i = 0; i + 1 < n && !row.marginal_flag; ++i)
                row.marginal_flag = row.bit_marginals[static_cast<std::size_t>(i)] <
                                    row.bit_marginals[static_cast<std::size_t>(i) + 1] - exact_tolerance;
            report.flag_count += row.side_flag + row.marginal_flag;
            report.rows.push_back(std::move(row));
            if (t < horizon) dist = evolve_distribution(model, std::move(dist), 1);
        }
        return report;
    }

    // Monte Carlo fallback: replicate trajectories, one-sided 3-sigma flags
    report.exact = false;
    const std::size_t columns = horizon + 1;
    std::vector<std::uint64_t> left(columns, 0), right(columns, 0), tie(columns, 0), optimal(columns, 0);
    std::vector<std::uint64_t> ones(columns * static_cast<std::size_t>(n), 0);
    for (std::uint64_t r = 0; r < mc_replicates; ++r) {
        ea_config cfg{f, N, std::max<std::uint64_t>(horizon, 1), true, std::nullopt};
        const run_record record = run_ea(cfg, mix64(seed ^ mix64(r + 1)));
        for (std::uint64_t t = 0; t <= horizon; ++t) {
            const bit_string& x =
                record.trajectory[std::min<std::size_t>(t, record.trajectory.size() - 1)];
            switch (detail::classify_strict(x)) {
                case detail::strict_side::left: ++left[t]; break;
                case detail::strict_side::right: ++right[t]; break;
                case detail::strict_side::tie: ++tie[t]; break;
                case detail::strict_side::optimal: ++optimal[t]; break;
            }
            for (int i = 0; i < n; ++i)
                if (x.bit(i)) ++ones[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
        }
    }
    const double R = static_cast<double>(mc_replicates);
    for (std::uint64_t t = 0; t <= horizon; ++t) {
        invariant_row row;
        row.t = t;
        row.p_left = static_cast<double>(left[t]) / R;
        row.p_right = static_cast<double>(right[t]) / R;
        row.p_tie = static_cast<double>(tie[t]) / R;
        row.p_optimal = static_cast<double>(optimal[t]) / R;
        row.bit_marginals.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            row.bit_marginals[static_cast<std::size_t>(i)] =
                static_cast<double>(ones[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)]) / R;
        const double diff = row.p_left - row.p_right;
        const double sigma =
            std::sqrt(std::max(0.0, row.p_left + row.p_right - diff * diff) / R);
        row.side_flag = diff < -3.0 * sigma && sigma > 0.0;
        for (int i = 0; i + 1 < n && !row.marginal_flag; ++i) {
            const double a = row.bit_marginals[static_cast<std::size_t>(i)];
            const double b = row.bit_marginals[static_cast<std::size_t>(i) + 1];
            const double s = std::sqrt((a * (1 - a) + b * (1 - b)) / R);
            row.marginal_flag = (a < b - 3.0 * s) && s > 0.0;
        }
        report.flag_count += row.side_flag + row.marginal_flag;
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace driftlab
