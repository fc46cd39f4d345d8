#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "driftlab/bitstring.hpp"
#include "driftlab/fitness.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

struct ea_config {
    fitness_function fitness;
    int population_size = 1;             // children per generation
    std::uint64_t max_generations = 0;   // 0 = default of 1000 n (ln n + 1)
    bool record_trajectory = false;
    std::optional<bit_string> initial;   // default: uniform over {0,1}^n
};

inline std::uint64_t default_max_generations(int n) {
    return static_cast<std::uint64_t>(std::ceil(1000.0 * n * (std::log(n) + 1.0)));
}

struct run_record {
    std::uint64_t generations = 0; // selection steps before the parent is optimal
    std::uint64_t evaluations = 0; // generations * N, timeouts included
    std::uint64_t seed = 0;
    bool hit_optimum = false;
    std::vector<bit_string> trajectory; // parents from generation 0 onward, if recorded
};

struct batch_stats {
    std::uint64_t runs = 0;
    double mean_generations = 0.0;
    double mean_evaluations = 0.0;
    double std_error_generations = 0.0;
    double std_error_evaluations = 0.0;
    std::uint64_t timeout_count = 0;
};

namespace detail {

// flips each bit independently with probability 1/n, walking flip positions
// by geometric gaps so the cost is O(expected flips) instead of O(n)
inline void mutate_into(const bit_string& parent, bit_string& child, rng& gen) {
    child = parent;
    const int n = parent.size();
    if (n == 1) { // probability 1/n = 1: the bit always flips
        child.flip_bit(0);
        return;
    }
    const double denom = std::log1p(-1.0 / n);
    double position = -1.0;
    for (;;) {
        const double gap = std::floor(std::log1p(-gen.next_double()) / denom);
        position += 1.0 + gap;
        if (position >= n) break;
        child.flip_bit(static_cast<int>(position));
    }
}

} // namespace detail

inline bit_string mutate(const bit_string& x, rng& gen) {
    bit_string child(x.size());
    detail::mutate_into(x, child, gen);
    return child;
}

/// Strict elitist selection: the best child replaces the parent only when it
/// is strictly fitter; ties among equally-fittest children resolve uniformly
/// at random (reservoir rule, one rng draw per tie encountered).
inline const bit_string& select(const bit_string& parent, std::span<const bit_string> children,
                                const fitness_function& f, rng& gen) {
    const bit_string* best = nullptr;
    fitness_value best_value{};
    std::uint64_t tie_count = 0;
    for (const auto& child : children) {
        const fitness_value value = f.evaluate(child);
        if (best == nullptr || best_value < value) {
            best = &child;
            best_value = value;
            tie_count = 1;
        } else if (value == best_value) {
            ++tie_count;
            if (gen.next_below(tie_count) == 0) best = &child;
        }
    }
    if (best != nullptr && f.evaluate(parent) < best_value) return *best;
    return parent;
}

inline run_record run_ea(const ea_config& cfg, std::uint64_t seed) {
    if (cfg.population_size < 1) throw config_error("run_ea: population size must be >= 1");
    if (cfg.initial && cfg.initial->size() != cfg.fitness.n())
        throw length_mismatch("run_ea: initial parent length does not match the fitness function");
    const int n = cfg.fitness.n();
    const int population = cfg.population_size;
    const std::uint64_t max_generations =
        cfg.max_generations > 0 ? cfg.max_generations : default_max_generations(n);
    const fitness_value optimum = cfg.fitness.max_value();

    rng gen(seed);
    bit_string parent = cfg.initial ? *cfg.initial : bit_string::uniform_random(n, gen);
    fitness_value parent_value = cfg.fitness.evaluate(parent);

    run_record record;
    record.seed = seed;
    if (cfg.record_trajectory) record.trajectory.push_back(parent);

    std::vector<bit_string> children(static_cast<std::size_t>(population), bit_string(n));
    while (!(parent_value == optimum) && record.generations < max_generations) {
        for (auto& child : children) detail::mutate_into(parent, child, gen);
        const bit_string& next = select(parent, children, cfg.fitness, gen);
        if (&next != &parent) {
            parent = next;
            parent_value = cfg.fitness.evaluate(parent);
        }
        ++record.generations;
        if (cfg.record_trajectory) record.trajectory.push_back(parent);
    }
    record.hit_optimum = (parent_value == optimum);
    record.evaluations = record.generations * static_cast<std::uint64_t>(population);
    return record;
}

/// Replicate seeds derive from (master_seed, run_index), so the statistics
/// do not depend on execution order. Timed-out runs are excluded from the
/// means and counted separately.
inline batch_stats batch_run(const ea_config& cfg, std::uint64_t replicates, std::uint64_t master_seed) {
    if (replicates < 1) throw config_error("batch_run: need at least one replicate");
    batch_stats stats;
    stats.runs = replicates;
    double mean = 0.0, m2 = 0.0;
    std::uint64_t completed = 0;
    for (std::uint64_t i = 0; i < replicates; ++i) {
        const std::uint64_t run_seed = mix64(master_seed ^ mix64(i + 1));
        const run_record record = run_ea(cfg, run_seed);
        if (!record.hit_optimum) {
            ++stats.timeout_count;
            continue;
        }
        ++completed;
        const double g = static_cast<double>(record.generations);
        const double delta = g - mean;
        mean += delta / static_cast<double>(completed);
        m2 += delta * (g - mean);
    }
    if (completed > 0) {
        stats.mean_generations = mean;
        stats.mean_evaluations = mean * cfg.population_size;
        if (completed > 1) {
            const double variance = m2 / static_cast<double>(completed - 1);
            stats.std_error_generations = std::sqrt(variance / static_cast<double>(completed));
            stats.std_error_evaluations = stats.std_error_generations * cfg.population_size;
        }
    }
    return stats;
}

} // namespace driftlab
