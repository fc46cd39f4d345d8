#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "driftlab/bitstring.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/fitness.hpp"

namespace driftlab {

inline constexpr int oracle_full_cap = 14;     // full 2^n state space
inline constexpr int oracle_lumped_cap = 10000; // one-max level chain

namespace detail {

// (c + p)^N - c^N without cancellation
inline double rise_to_power(double c, double p, int N) {
    if (p <= 0.0) return 0.0;
    if (c <= 0.0) return std::pow(p, N);
    if (c <= p) return std::pow(c + p, N) - std::pow(c, N);
    return std::pow(c, N) * std::expm1(N * std::log1p(p / c));
}

// q(y|x) for hamming distance h: (1/n)^h (1-1/n)^(n-h)
inline std::vector<double> mutation_mass_by_distance(int n) {
    std::vector<double> mass(static_cast<std::size_t>(n) + 1);
    const long double p = 1.0L / n;
    for (int h = 0; h <= n; ++h)
        mass[static_cast<std::size_t>(h)] =
            static_cast<double>(std::pow(p, h) * std::pow(1.0L - p, n - h));
    return mass;
}

} // namespace detail

struct child_level {
    fitness_value value; // common fitness of the group
    double mass;         // total single-child probability of landing in the group
    std::vector<std::pair<std::uint32_t, double>> members; // (state mask, q)
};

/// Law of a single mutation child of x, grouped by exact fitness value in
/// ascending fitness order.
inline std::vector<child_level> child_distribution(const bit_string& x, const fitness_function& f) {
    const int n = f.n();
    if (n > oracle_full_cap) throw cap_exceeded("child_distribution: n exceeds oracle cap of 14");
    if (x.size() != n) throw length_mismatch("child_distribution: length mismatch");
    const auto qpow = detail::mutation_mass_by_distance(n);
    const std::uint32_t count = std::uint32_t{1} << n;
    const std::uint64_t xmask = x.to_mask();

    std::vector<std::pair<fitness_value, std::uint32_t>> by_fitness;
    by_fitness.reserve(count);
    for (std::uint32_t y = 0; y < count; ++y)
        by_fitness.emplace_back(f.evaluate(bit_string::from_mask(n, y)), y);
    std::stable_sort(by_fitness.begin(), by_fitness.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<child_level> levels;
    for (std::size_t i = 0; i < by_fitness.size();) {
        child_level level;
        level.value = by_fitness[i].first;
        long double group_mass = 0.0L;
        std::size_t j = i;
        for (; j < by_fitness.size() && by_fitness[j].first == level.value; ++j) {
            const std::uint32_t y = by_fitness[j].second;
            const double q = qpow[static_cast<std::size_t>(std::popcount(xmask ^ y))];
            level.members.emplace_back(y, q);
            group_mass += q;
        }
        level.mass = static_cast<double>(group_mass);
        levels.push_back(std::move(level));
        i = j;
    }
    return levels;
}

/// One exact transition row of the (1+N) EA from x: the born-fittest child
/// replaces x only when strictly fitter, ties resolved uniformly. For a
/// successor y at fitness level F with group mass p_F and strictly-lower
/// mass p_<F, P(y|x) = (q(y|x)/p_F) ((p_<F + p_F)^N - p_<F^N).
inline std::vector<std::pair<bit_string, double>> transition_row(const bit_string& x,
                                                                 const fitness_function& f, int N) {
    if (N < 1) throw config_error("transition_row: N must be >= 1");
    const auto levels = child_distribution(x, f);
    const fitness_value fx = f.evaluate(x);
    const int n = f.n();

    std::vector<std::pair<bit_string, double>> row;
    long double below = 0.0L;
    long double stay = 0.0L;
    for (const auto& level : levels) {
        if (!(fx < level.value)) {
            below += level.mass;
            stay += level.mass;
            continue;
        }
        const double bracket = detail::rise_to_power(static_cast<double>(below), level.mass, N);
        for (const auto& [y, q] : level.members)
            row.emplace_back(bit_string::from_mask(n, y), q / level.mass * bracket);
        below += level.mass;
    }
    row.emplace_back(x, std::pow(static_cast<double>(stay), N));
    return row;
}

/// Exact absorbing chain of the (1+N) EA over either the full state space
/// {0,1}^n or the lumped level chain (one-max only). Rows are CSR; each row
/// puts mass only on the state itself and on strictly fitter states.
struct transition_model {
    enum class kind_t { full, lumped_one_max };

    kind_t kind = kind_t::full;
    int n = 0;
    int population_size = 1;
    std::uint32_t state_count = 0;
    std::vector<std::size_t> row_offset;
    std::vector<std::uint32_t> col;
    std::vector<double> prob;
    std::vector<fitness_value> state_fitness;
    std::vector<int> state_level;   // number of zero bits
    std::vector<char> absorbing;    // 1 on the maximal-fitness set
    std::vector<double> init_weight; // uniform-initialization probability
    std::vector<std::uint32_t> fitness_ascending;

    std::size_t row_begin(std::uint32_t s) const { return row_offset[s]; }
    std::size_t row_end(std::uint32_t s) const { return row_offset[s + 1]; }

    double self_probability(std::uint32_t s) const {
        for (std::size_t e = row_begin(s); e < row_end(s); ++e)
            if (col[e] == s) return prob[e];
        return 0.0;
    }

    std::string state_label(std::uint32_t s) const {
        return kind == kind_t::full ? bit_string::from_mask(n, s).to_string() : std::to_string(s);
    }

    std::uint32_t optimal_count() const {
        return static_cast<std::uint32_t>(std::count(absorbing.begin(), absorbing.end(), char{1}));
    }
};

inline transition_model build_model(const fitness_function& f, int N) {
    const int n = f.n();
    if (n > oracle_full_cap) throw cap_exceeded("build_model: n exceeds oracle cap of 14");
    if (N < 1) throw config_error("build_model: N must be >= 1");

    transition_model model;
    model.kind = transition_model::kind_t::full;
    model.n = n;
    model.population_size = N;
    model.state_count = std::uint32_t{1} << n;

    model.state_fitness.reserve(model.state_count);
    model.state_level.reserve(model.state_count);
    for (std::uint32_t s = 0; s < model.state_count; ++s) {
        model.state_fitness.push_back(f.evaluate(bit_string::from_mask(n, s)));
        model.state_level.push_back(n - std::popcount(s));
    }
    const fitness_value best = *std::max_element(model.state_fitness.begin(), model.state_fitness.end());
    model.absorbing.resize(model.state_count);
    for (std::uint32_t s = 0; s < model.state_count; ++s)
        model.absorbing[s] = (model.state_fitness[s] == best) ? 1 : 0;
    model.init_weight.assign(model.state_count, std::ldexp(1.0, -n));

    model.fitness_ascending.resize(model.state_count);
    std::iota(model.fitness_ascending.begin(), model.fitness_ascending.end(), 0u);
    std::stable_sort(model.fitness_ascending.begin(), model.fitness_ascending.end(),
                     [&model](std::uint32_t a, std::uint32_t b) {
                         return model.state_fitness[a] < model.state_fitness[b];
                     });

    // fitness group boundaries over the sorted order
    std::vector<std::size_t> group_start;
    for (std::size_t i = 0; i < model.fitness_ascending.size();) {
        group_start.push_back(i);
        const fitness_value& v = model.state_fitness[model.fitness_ascending[i]];
        std::size_t j = i;
        while (j < model.fitness_ascending.size() &&
               model.state_fitness[model.fitness_ascending[j]] == v)
            ++j;
        i = j;
    }
    group_start.push_back(model.fitness_ascending.size());

    const auto qpow = detail::mutation_mass_by_distance(n);
    model.row_offset.reserve(model.state_count + 1);
    model.row_offset.push_back(0);
    for (std::uint32_t x = 0; x < model.state_count; ++x) {
        if (model.absorbing[x]) {
            model.col.push_back(x);
            model.prob.push_back(1.0);
            model.row_offset.push_back(model.col.size());
            continue;
        }
        const fitness_value& fx = model.state_fitness[x];
        long double below = 0.0L;
        long double stay = 0.0L;
        for (std::size_t gi = 0; gi + 1 < group_start.size(); ++gi) {
            const std::size_t begin = group_start[gi], end = group_start[gi + 1];
            const fitness_value& fv = model.state_fitness[model.fitness_ascending[begin]];
            long double group_mass = 0.0L;
            for (std::size_t i = begin; i < end; ++i)
                group_mass += qpow[static_cast<std::size_t>(
                    std::popcount(x ^ model.fitness_ascending[i]))];
            if (!(fx < fv)) {
                below += group_mass;
                stay += group_mass;
                continue;
            }
            const double bracket =
                detail::rise_to_power(static_cast<double>(below), static_cast<double>(group_mass), N);
            for (std::size_t i = begin; i < end; ++i) {
                const std::uint32_t y = model.fitness_ascending[i];
                const double q = qpow[static_cast<std::size_t>(std::popcount(x ^ y))];
                model.col.push_back(y);
                model.prob.push_back(q / static_cast<double>(group_mass) * bracket);
            }
            below += group_mass;
        }
        model.col.push_back(x);
        model.prob.push_back(std::pow(static_cast<double>(stay), N));
        model.row_offset.push_back(model.col.size());
    }
    return model;
}

/// One-max collapses to the level chain: all states with k zero bits behave
/// identically, so the chain over k = 0..n is exact. Supports large n; the
/// per-level child law is a convolution of two thin binomials.
inline transition_model build_lumped_one_max_model(int n, int N) {
    if (n > oracle_lumped_cap) throw cap_exceeded("build_lumped_one_max_model: n exceeds cap of 10000");
    if (n < 1 || N < 1) throw config_error("build_lumped_one_max_model: need n >= 1, N >= 1");

    transition_model model;
    model.kind = transition_model::kind_t::lumped_one_max;
    model.n = n;
    model.population_size = N;
    model.state_count = static_cast<std::uint32_t>(n) + 1;

    for (std::uint32_t k = 0; k <= static_cast<std::uint32_t>(n); ++k) {
        model.state_fitness.push_back(static_cast<std::uint64_t>(n) - k);
        model.state_level.push_back(static_cast<int>(k));
        model.absorbing.push_back(k == 0 ? 1 : 0);
        const double log_weight = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                  std::lgamma(n - k + 1.0) - n * std::log(2.0);
        model.init_weight.push_back(std::exp(log_weight));
    }
    model.fitness_ascending.resize(model.state_count);
    std::iota(model.fitness_ascending.rbegin(), model.fitness_ascending.rend(), 0u);

    const double p = 1.0 / n;
    // binomial pmf values above ~60 flips are below double range for p = 1/n
    const auto binomial_pmf = [p](int trials) {
        std::vector<long double> pmf;
        pmf.reserve(65);
        long double term = std::pow(1.0L - static_cast<long double>(p), trials);
        const long double ratio = static_cast<long double>(p) / (1.0L - static_cast<long double>(p));
        pmf.push_back(term);
        for (int b = 1; b <= trials && b <= 64; ++b) {
            term *= ratio * static_cast<long double>(trials - b + 1) / b;
            if (term < 1e-24L && b > 2) break;
            pmf.push_back(term);
        }
        return pmf;
    };

    model.row_offset.push_back(0);
    for (int k = 0; k <= n; ++k) {
        if (k == 0) {
            model.col.push_back(0);
            model.prob.push_back(1.0);
            model.row_offset.push_back(model.col.size());
            continue;
        }
        const auto down = binomial_pmf(k);     // zero bits flipped on
        const auto up = binomial_pmf(n - k);   // one bits flipped off
        // single-child law over levels j = k - b + a within the truncation window
        const int j_min = k - static_cast<int>(down.size()) + 1;
        const int j_max = std::min(n, k + static_cast<int>(up.size()) - 1);
        std::vector<long double> level_mass(static_cast<std::size_t>(j_max - j_min) + 1, 0.0L);
        for (std::size_t b = 0; b < down.size(); ++b)
            for (std::size_t a = 0; a < up.size(); ++a) {
                const int j = k - static_cast<int>(b) + static_cast<int>(a);
                if (j >= j_min && j <= j_max)
                    level_mass[static_cast<std::size_t>(j - j_min)] += down[b] * up[a];
            }
        // suffix masses: T[j] = P(child level >= j)
        std::vector<long double> suffix(level_mass.size() + 1, 0.0L);
        for (std::size_t i = level_mass.size(); i-- > 0;)
            suffix[i] = suffix[i + 1] + level_mass[i];
        // improving targets j < k, best fitness first
        for (int j = std::max(0, j_min); j < k; ++j) {
            const std::size_t idx = static_cast<std::size_t>(j - j_min);
            const double entry = detail::rise_to_power(static_cast<double>(suffix[idx + 1]),
                                                       static_cast<double>(level_mass[idx]), N);
            if (entry > 0.0) {
                model.col.push_back(static_cast<std::uint32_t>(j));
                model.prob.push_back(entry);
            }
        }
        const std::size_t k_idx = static_cast<std::size_t>(k - j_min);
        model.col.push_back(static_cast<std::uint32_t>(k));
        model.prob.push_back(std::pow(static_cast<double>(suffix[k_idx]), N));
        model.row_offset.push_back(model.col.size());
    }
    return model;
}

struct hitting_time_table {
    std::vector<double> expected_generations; // g(x); 0 on the optimal set
    double uniform_average = 0.0;             // sum of g over the uniform initialization
};

/// Solves g = 1 + P g on the non-optimal set. Elitism makes the system
/// triangular in fitness order, so one back-substitution sweep is exact.
inline hitting_time_table exact_hitting_time(const transition_model& model) {
    hitting_time_table table;
    table.expected_generations.assign(model.state_count, 0.0);
    for (auto it = model.fitness_ascending.rbegin(); it != model.fitness_ascending.rend(); ++it) {
        const std::uint32_t x = *it;
        if (model.absorbing[x]) continue;
        long double accum = 1.0L;
        long double escape = 0.0L;
        for (std::size_t e = model.row_begin(x); e < model.row_end(x); ++e) {
            if (model.col[e] == x) continue;
            accum += static_cast<long double>(model.prob[e]) * table.expected_generations[model.col[e]];
            escape += model.prob[e];
        }
        if (escape <= 0.0L)
            throw singular_system("exact_hitting_time: state " + model.state_label(x) +
                                  " has no escape mass");
        table.expected_generations[x] = static_cast<double>(accum / escape);
    }
    long double uniform = 0.0L;
    for (std::uint32_t s = 0; s < model.state_count; ++s)
        uniform += static_cast<long double>(model.init_weight[s]) * table.expected_generations[s];
    table.uniform_average = static_cast<double>(uniform);
    return table;
}

struct state_distribution {
    std::vector<double> probs;
    std::uint64_t generation = 0;
};

inline state_distribution uniform_init(const transition_model& model) {
    return {model.init_weight, 0};
}

inline double non_optimal_mass(const transition_model& model, const state_distribution& dist) {
    long double mass = 0.0L;
    for (std::uint32_t s = 0; s < model.state_count; ++s)
        if (!model.absorbing[s]) mass += dist.probs[s];
    return static_cast<double>(mass);
}

inline state_distribution evolve_distribution(const transition_model& model, state_distribution dist,
                                              std::uint64_t steps) {
    std::vector<double> next(model.state_count);
    for (std::uint64_t step = 0; step < steps; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint32_t x = 0; x < model.state_count; ++x) {
            const double mass = dist.probs[x];
            if (mass == 0.0) continue;
            for (std::size_t e = model.row_begin(x); e < model.row_end(x); ++e)
                next[model.col[e]] += mass * model.prob[e];
        }
        dist.probs.swap(next);
        ++dist.generation;
    }
    return dist;
}

/// Mass arriving in the optimal set on the next step.
inline double absorption_flow(const transition_model& model, const state_distribution& dist) {
    long double flow = 0.0L;
    for (std::uint32_t x = 0; x < model.state_count; ++x) {
        if (model.absorbing[x] || dist.probs[x] == 0.0) continue;
        for (std::size_t e = model.row_begin(x); e < model.row_end(x); ++e)
            if (model.absorbing[model.col[e]])
                flow += static_cast<long double>(dist.probs[x]) * model.prob[e];
    }
    return static_cast<double>(flow);
}

struct pointwise_drift {
    double total = 0.0;
    double positive = 0.0; // from successors with smaller distance
    double negative = 0.0; // from successors with larger distance (non-positive value)
};

inline pointwise_drift exact_pointwise_drift(const transition_model& model, std::uint32_t state,
                                             std::span<const double> distance) {
    if (model.absorbing[state])
        throw optimal_state("exact_pointwise_drift: state " + model.state_label(state) + " is optimal");
    pointwise_drift drift;
    const double dx = distance[state];
    for (std::size_t e = model.row_begin(state); e < model.row_end(state); ++e) {
        if (model.col[e] == state) continue;
        const double diff = dx - distance[model.col[e]];
        if (diff > 0.0)
            drift.positive += diff * model.prob[e];
        else if (diff < 0.0)
            drift.negative += diff * model.prob[e];
    }
    drift.total = drift.positive + drift.negative;
    return drift;
}

/// Average drift over the conditional law of the t-th generation given
/// non-optimality; zero by convention once no non-optimal mass remains.
inline double exact_average_drift(const transition_model& model, const state_distribution& dist,
                                  std::span<const double> distance) {
    long double weighted = 0.0L;
    long double mass = 0.0L;
    for (std::uint32_t s = 0; s < model.state_count; ++s) {
        if (model.absorbing[s] || dist.probs[s] == 0.0) continue;
        weighted += static_cast<long double>(exact_pointwise_drift(model, s, distance).total) *
                    dist.probs[s];
        mass += dist.probs[s];
    }
    if (mass <= 0.0L) return 0.0;
    return static_cast<double>(weighted / mass);
}

/// Right-continuous cdf of the point-wise drift under the conditional law at
/// generation t: F(delta) = P(drift(X) <= delta | X non-optimal).
struct drift_cdf_function {
    std::vector<std::pair<double, double>> steps; // (drift value, cumulative probability)

    double operator()(double delta) const {
        double cumulative = 0.0;
        for (const auto& [value, cum] : steps) {
            if (value > delta) break;
            cumulative = cum;
        }
        return cumulative;
    }
};

inline drift_cdf_function drift_cdf(const transition_model& model, const state_distribution& dist,
                                    std::span<const double> distance) {
    std::vector<std::pair<double, double>> atoms;
    long double mass = 0.0L;
    for (std::uint32_t s = 0; s < model.state_count; ++s) {
        if (model.absorbing[s] || dist.probs[s] == 0.0) continue;
        atoms.emplace_back(exact_pointwise_drift(model, s, distance).total, dist.probs[s]);
        mass += dist.probs[s];
    }
    std::sort(atoms.begin(), atoms.end());
    drift_cdf_function cdf;
    long double cumulative = 0.0L;
    for (std::size_t i = 0; i < atoms.size();) {
        const double value = atoms[i].first;
        std::size_t j = i;
        for (; j < atoms.size() && atoms[j].first == value; ++j) cumulative += atoms[j].second;
        cdf.steps.emplace_back(value, static_cast<double>(cumulative / mass));
        i = j;
    }
    return cdf;
}

inline void export_model_csv(const transition_model& model, std::ostream& out) {
    out << "from_state,to_state,prob\n";
    char buf[64];
    for (std::uint32_t x = 0; x < model.state_count; ++x)
        for (std::size_t e = model.row_begin(x); e < model.row_end(x); ++e) {
            std::snprintf(buf, sizeof(buf), "%.17g", model.prob[e]);
            out << model.state_label(x) << ',' << model.state_label(model.col[e]) << ',' << buf << '\n';
        }
}

inline void export_hitting_csv(const transition_model& model, const hitting_time_table& table,
                               std::ostream& out) {
    out << "state,g\n";
    char buf[64];
    for (std::uint32_t s = 0; s < model.state_count; ++s) {
        std::snprintf(buf, sizeof(buf), "%.17g", table.expected_generations[s]);
        out << model.state_label(s) << ',' << buf << '\n';
    }
}

} // namespace driftlab
