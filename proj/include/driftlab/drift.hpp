#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftlab/distance.hpp"
#include "driftlab/engine.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/fitness.hpp"
#include "driftlab/oracle.hpp"

namespace driftlab {

inline const double theorem6_constant = 8.0 * (std::numbers::e + std::numbers::e * std::numbers::e);
inline const double lemma7_constant = 0.25 / (std::numbers::e + std::numbers::e * std::numbers::e);
inline const double lemma6_ratio_bound = 0.75;
inline const double lemma8_constant = 1.0 / std::numbers::e;

inline std::vector<double> state_distances(const transition_model& model, const distance_function& d) {
    if (d.n != model.n) throw config_error("state_distances: distance table length does not match");
    std::vector<double> out(model.state_count);
    for (std::uint32_t s = 0; s < model.state_count; ++s)
        out[s] = d.values[static_cast<std::size_t>(model.state_level[s])];
    return out;
}

enum class bound_variant { pointwise, average };

/// One drift-theorem verification: c is the drift bound actually measured,
/// bound = d_init / c the implied hitting-time bound, slack the worst margin
/// of the checked inequality (negative = violated).
struct bound_report {
    bool upper = true;
    bound_variant variant = bound_variant::average;
    bool applicable = true; // false when the measured c is not positive
    double c = 0.0;
    double d_init = 0.0;
    double bound = 0.0;
    double exact_g = 0.0; // uniform-average hitting time
    double slack = 0.0;
    bool satisfied = false;
    std::uint64_t horizon_used = 0;
};

namespace detail {

inline constexpr double bound_tolerance = 1e-9;
inline constexpr double mass_floor = 1e-12; // below this the conditional law is numerically void

struct drift_scan {
    std::vector<double> per_state; // NaN on the optimal set
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
};

inline drift_scan scan_pointwise_drift(const transition_model& model, std::span<const double> distance) {
    drift_scan scan;
    scan.per_state.assign(model.state_count, std::numeric_limits<double>::quiet_NaN());
    for (std::uint32_t s = 0; s < model.state_count; ++s) {
        if (model.absorbing[s]) continue;
        const double value = exact_pointwise_drift(model, s, distance).total;
        scan.per_state[s] = value;
        scan.min = std::min(scan.min, value);
        scan.max = std::max(scan.max, value);
    }
    return scan;
}

struct average_scan {
    double inf = std::numeric_limits<double>::infinity();
    double sup = -std::numeric_limits<double>::infinity();
    std::uint64_t horizon = 0;
};

inline average_scan scan_average_drift(const transition_model& model, const drift_scan& drifts,
                                       std::uint64_t max_horizon) {
    average_scan scan;
    state_distribution dist = uniform_init(model);
    for (std::uint64_t t = 0; t <= max_horizon; ++t) {
        long double weighted = 0.0L, mass = 0.0L;
        for (std::uint32_t s = 0; s < model.state_count; ++s) {
            if (model.absorbing[s]) continue;
            weighted += static_cast<long double>(drifts.per_state[s]) * dist.probs[s];
            mass += dist.probs[s];
        }
        if (mass < mass_floor) break;
        const double average = static_cast<double>(weighted / mass);
        scan.inf = std::min(scan.inf, average);
        scan.sup = std::max(scan.sup, average);
        scan.horizon = t;
        dist = evolve_distribution(model, std::move(dist), 1);
    }
    return scan;
}

inline bound_report verify_bound(const transition_model& model, std::span<const double> distance,
                                 bool upper, bound_variant variant, std::uint64_t max_horizon) {
    bound_report report;
    report.upper = upper;
    report.variant = variant;

    const hitting_time_table hitting = exact_hitting_time(model);
    report.exact_g = hitting.uniform_average;
    long double d_init = 0.0L;
    for (std::uint32_t s = 0; s < model.state_count; ++s)
        d_init += static_cast<long double>(model.init_weight[s]) * distance[s];
    report.d_init = static_cast<double>(d_init);

    const drift_scan drifts = scan_pointwise_drift(model, distance);
    if (variant == bound_variant::pointwise) {
        report.c = upper ? drifts.min : drifts.max;
    } else {
        const average_scan averages = scan_average_drift(model, drifts, max_horizon);
        report.c = upper ? averages.inf : averages.sup;
        report.horizon_used = averages.horizon;
    }
    if (!(report.c > 0.0)) {
        report.applicable = false;
        return report;
    }

    report.bound = report.d_init / report.c;
    if (variant == bound_variant::average) {
        report.slack = upper ? report.bound - report.exact_g : report.exact_g - report.bound;
    } else {
        // the point-wise theorems bound g(X) for every start, so take the
        // worst state
        double worst = std::numeric_limits<double>::infinity();
        for (std::uint32_t s = 0; s < model.state_count; ++s) {
            if (model.absorbing[s]) continue;
            const double per_state_bound = distance[s] / report.c;
            const double margin = upper ? per_state_bound - hitting.expected_generations[s]
                                        : hitting.expected_generations[s] - per_state_bound;
            worst = std::min(worst, margin);
        }
        report.slack = worst;
    }
    report.satisfied = report.slack >= -bound_tolerance;
    return report;
}

} // namespace detail

inline bound_report verify_upper_bound_theorem(const transition_model& model,
                                               std::span<const double> distance, bound_variant variant,
                                               std::uint64_t max_horizon = 1000000) {
    return detail::verify_bound(model, distance, true, variant, max_horizon);
}

inline bound_report verify_upper_bound_theorem(const transition_model& model, const distance_function& d,
                                               bound_variant variant, std::uint64_t max_horizon = 1000000) {
    return detail::verify_bound(model, state_distances(model, d), true, variant, max_horizon);
}

inline bound_report verify_lower_bound_theorem(const transition_model& model,
                                               std::span<const double> distance, bound_variant variant,
                                               std::uint64_t max_horizon = 1000000) {
    return detail::verify_bound(model, distance, false, variant, max_horizon);
}

inline bound_report verify_lower_bound_theorem(const transition_model& model, const distance_function& d,
                                               bound_variant variant, std::uint64_t max_horizon = 1000000) {
    return detail::verify_bound(model, state_distances(model, d), false, variant, max_horizon);
}

/// Measured drift inequalities for a linear-like function. Hard requirements
/// are non-negativity everywhere and strict positivity on the left-heavy
/// states; the constants from the asymptotic analysis are reported beside
/// the measured extrema, never asserted.
struct lemma_report {
    std::string fitness_name;
    int n = 0;
    int population_size = 1;

    bool drift_nonnegative = true; // drift >= -1e-12 on every non-optimal state
    double min_drift = std::numeric_limits<double>::infinity();
    bool left_heavy_positive = true; // drift strictly positive on S_L
    double min_drift_left_heavy = std::numeric_limits<double>::infinity();
    double claimed_left_heavy_lower = 0.0; // 1/(4e+4e^2)
    double max_negative_ratio = 0.0;       // max over S_L of -drift^-/drift^+
    double claimed_negative_ratio_bound = 0.0;
    std::uint32_t left_heavy_count = 0;

    std::optional<double> min_drift_piecewise; // one-max only, piecewise distance
    double claimed_piecewise_lower = 0.0;      // 1/e

    bool hard_assertions_hold() const { return drift_nonnegative && left_heavy_positive; }
};

inline lemma_report verify_lemma_inequalities(const fitness_function& f, int N) {
    const property_report linear_like = check_linear_like(f);
    if (!linear_like.holds)
        throw not_linear_like("verify_lemma_inequalities: " + f.name() +
                              " is not linear-like: " + linear_like.detail);

    lemma_report report;
    report.fitness_name = f.name();
    report.n = f.n();
    report.population_size = N;
    report.claimed_left_heavy_lower = lemma7_constant;
    report.claimed_negative_ratio_bound = lemma6_ratio_bound;
    report.claimed_piecewise_lower = lemma8_constant;

    const transition_model model = build_model(f, N);
    const auto upper = state_distances(model, make_distance(distance_kind::upper, f.n(), N));
    for (std::uint32_t s = 0; s < model.state_count; ++s) {
        if (model.absorbing[s]) continue;
        const pointwise_drift drift = exact_pointwise_drift(model, s, upper);
        report.min_drift = std::min(report.min_drift, drift.total);
        if (drift.total < -1e-12) report.drift_nonnegative = false;
        if (classify_side(bit_string::from_mask(model.n, s)) == side_class::left_heavy) {
            ++report.left_heavy_count;
            report.min_drift_left_heavy = std::min(report.min_drift_left_heavy, drift.total);
            if (!(drift.total > 0.0)) report.left_heavy_positive = false;
            const double ratio = drift.positive > 0.0
                                     ? -drift.negative / drift.positive
                                     : (drift.negative < 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            report.max_negative_ratio = std::max(report.max_negative_ratio, ratio);
        }
    }

    if (f.kind() == fitness_kind::one_max) {
        const auto piecewise = state_distances(model, make_distance(distance_kind::piecewise, f.n(), N));
        double lowest = std::numeric_limits<double>::infinity();
        for (std::uint32_t s = 0; s < model.state_count; ++s) {
            if (model.absorbing[s]) continue;
            lowest = std::min(lowest, exact_pointwise_drift(model, s, piecewise).total);
        }
        report.min_drift_piecewise = lowest;
    }
    return report;
}

/// The explicit hitting-time bound 8(e+e^2) d(initial) with the harmonic-plus-
/// unit increment distance, checked against the exact uniform-average value.
struct explicit_bound_check {
    double exact_g = 0.0;
    double d_init = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

inline explicit_bound_check check_theorem6_bound(const fitness_function& f, int N) {
    explicit_bound_check check;
    const transition_model model = build_model(f, N);
    check.exact_g = exact_hitting_time(model).uniform_average;
    const distance_function d = make_distance(distance_kind::upper, f.n(), N);
    check.d_init = expected_initial_distance(d, f.n());
    check.bound = theorem6_constant * check.d_init;
    check.satisfied = check.exact_g <= check.bound + detail::bound_tolerance;
    return check;
}

struct mc_estimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// Unbiased Monte Carlo estimate of the point-wise drift at x: simulates the
/// child batch and selection, averaging d(x) - d(next parent).
inline mc_estimate estimate_drift_mc(const bit_string& x, const distance_function& d,
                                     const fitness_function& f, int N, std::uint64_t samples,
                                     std::uint64_t seed) {
    if (samples < 1) throw config_error("estimate_drift_mc: need samples >= 1");
    if (x.size() != f.n() || d.n != f.n()) throw length_mismatch("estimate_drift_mc: size mismatch");
    rng gen(seed);
    const double dx = d[x.level_index()];
    std::vector<bit_string> children(static_cast<std::size_t>(N), bit_string(x.size()));
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        for (auto& child : children) detail::mutate_into(x, child, gen);
        const bit_string& next = select(x, children, f, gen);
        const double diff = (&next == &x) ? 0.0 : dx - d[next.level_index()];
        const double delta = diff - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (diff - mean);
    }
    mc_estimate out;
    out.samples = samples;
    out.estimate = mean;
    if (samples > 1)
        out.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return out;
}

enum class bound_formula_kind {
    one_max_lower,         // n ln n, any N >= 1 (holds for every monotonic function)
    one_max_lower_large_n, // n N ln ln N / ln N, N > e^e
    linear_like_upper,     // n N + n ln n
    one_max_upper,         // n ln n, plus the large-N term above the threshold
    bin_val_lower,         // N n (stated for N = O(n))
    one_max_cutoff,        // (ln n)(ln ln n) / ln ln ln n
    bin_val_cutoff         // ln n
};

inline std::string bound_formula_name(bound_formula_kind kind) {
    switch (kind) {
        case bound_formula_kind::one_max_lower: return "onemax_lower";
        case bound_formula_kind::one_max_lower_large_n: return "onemax_lower_large_n";
        case bound_formula_kind::linear_like_upper: return "linearlike_upper";
        case bound_formula_kind::one_max_upper: return "onemax_upper";
        case bound_formula_kind::bin_val_lower: return "binval_lower";
        case bound_formula_kind::one_max_cutoff: return "onemax_cutoff";
        case bound_formula_kind::bin_val_cutoff: return "binval_cutoff";
    }
    return "?";
}

/// Evaluates the bracketed running-time expression with implied constant 1.
inline double bound_formula(bound_formula_kind kind, int n, int N) {
    if (n < 2) throw formula_domain_error("bound_formula: need n >= 2");
    if (N < 1) throw formula_domain_error("bound_formula: need N >= 1");
    const double nd = n, Nd = N;
    switch (kind) {
        case bound_formula_kind::one_max_lower:
            return nd * std::log(nd);
        case bound_formula_kind::one_max_lower_large_n:
            if (!(Nd > e_to_the_e))
                throw formula_domain_error("bound_formula: the ln ln N branch needs N > e^e");
            return nd * Nd * std::log(std::log(Nd)) / std::log(Nd);
        case bound_formula_kind::linear_like_upper:
            return nd * Nd + nd * std::log(nd);
        case bound_formula_kind::one_max_upper:
            if (Nd > e_to_the_e)
                return nd * std::log(nd) + nd * Nd * std::log(std::log(Nd)) / std::log(Nd);
            return nd * std::log(nd);
        case bound_formula_kind::bin_val_lower:
            return Nd * nd;
        case bound_formula_kind::one_max_cutoff: {
            if (!(nd > e_to_the_e))
                throw formula_domain_error("bound_formula: the cut-off formula needs n > e^e");
            return std::log(nd) * std::log(std::log(nd)) / std::log(std::log(std::log(nd)));
        }
        case bound_formula_kind::bin_val_cutoff:
            return std::log(nd);
    }
    throw formula_domain_error("bound_formula: unknown kind");
}

} // namespace driftlab
