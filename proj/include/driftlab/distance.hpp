#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/errors.hpp"

namespace driftlab {

// exp(e): population sizes strictly above this (N >= 16) take the
// large-population branch of the piecewise construction and the bound formulas
inline const double e_to_the_e = std::exp(std::numbers::e);

enum class distance_kind { unit, harmonic, upper, piecewise, custom };

inline std::string distance_kind_name(distance_kind kind) {
    switch (kind) {
        case distance_kind::unit: return "unit";
        case distance_kind::harmonic: return "harmonic";
        case distance_kind::upper: return "upper";
        case distance_kind::piecewise: return "piecewise";
        case distance_kind::custom: return "custom";
    }
    return "?";
}

/// Level-based distance d_0..d_n over the number of zero bits. d_0 = 0 and
/// every built-in is strictly increasing in the level.
struct distance_function {
    distance_kind kind = distance_kind::unit;
    int n = 0;
    int population_size = 1;
    std::vector<double> values; // d_0..d_n

    double operator[](int level) const { return values[static_cast<std::size_t>(level)]; }
};

inline distance_function make_distance(distance_kind kind, int n, int N) {
    if (n < 1 || N < 1) throw config_error("make_distance: need n >= 1, N >= 1");
    distance_function d;
    d.kind = kind;
    d.n = n;
    d.population_size = N;
    d.values.resize(static_cast<std::size_t>(n) + 1, 0.0);
    switch (kind) {
        case distance_kind::unit:
            for (int k = 1; k <= n; ++k) d.values[static_cast<std::size_t>(k)] = k;
            break;
        case distance_kind::harmonic: {
            // d_k = (n/N) (1 + 1/2 + ... + 1/k)
            double harmonic = 0.0;
            for (int k = 1; k <= n; ++k) {
                harmonic += 1.0 / k;
                d.values[static_cast<std::size_t>(k)] = static_cast<double>(n) / N * harmonic;
            }
            break;
        }
        case distance_kind::upper:
            // d_k = d_{k-1} + n/(kN) + 1
            for (int k = 1; k <= n; ++k)
                d.values[static_cast<std::size_t>(k)] =
                    d.values[static_cast<std::size_t>(k) - 1] + static_cast<double>(n) / (static_cast<double>(k) * N) + 1.0;
            break;
        case distance_kind::piecewise: {
            // harmonic-style increments up to level K, then the flat increment
            // ln ln N / ln N; below the population threshold this is the upper
            // construction (L = 1, K = n)
            double cutoff = n;
            double flat_increment = 0.0;
            if (N > e_to_the_e) {
                const double big_l = std::log(static_cast<double>(N)) / std::log(std::log(static_cast<double>(N)));
                cutoff = static_cast<double>(n) / big_l;
                flat_increment = std::log(std::log(static_cast<double>(N))) / std::log(static_cast<double>(N));
            }
            for (int k = 1; k <= n; ++k) {
                const double increment = (static_cast<double>(k) <= cutoff)
                                             ? static_cast<double>(n) / (static_cast<double>(k) * N) + 1.0
                                             : flat_increment;
                d.values[static_cast<std::size_t>(k)] = d.values[static_cast<std::size_t>(k) - 1] + increment;
            }
            break;
        }
        case distance_kind::custom:
            throw config_error("make_distance: custom tables go through custom_distance");
    }
    return d;
}

inline distance_function custom_distance(std::vector<double> values) {
    if (values.empty() || values.front() != 0.0)
        throw config_error("custom_distance: need d_0 = 0 and at least one level");
    distance_function d;
    d.kind = distance_kind::custom;
    d.n = static_cast<int>(values.size()) - 1;
    d.values = std::move(values);
    return d;
}

/// Mean distance of a uniformly random initial string: sum_k d_k C(n,k) 2^-n.
inline double expected_initial_distance(const distance_function& d, int n) {
    if (n != d.n) throw config_error("expected_initial_distance: n does not match the table");
    long double total = 0.0L;
    long double binom = 1.0L; // C(n,0)
    for (int k = 0; k <= n; ++k) {
        total += static_cast<long double>(d.values[static_cast<std::size_t>(k)]) * binom;
        binom = binom * (n - k) / (k + 1);
    }
    return static_cast<double>(total * std::pow(0.5L, n));
}

struct increment_violation {
    int k = 0, step = 0;
    double lhs = 0.0, rhs = 0.0;
};

/// Scans d_k - d_{k-l} >= l (d_k - d_{k-1}) for every k and l.
inline std::optional<increment_violation> scan_backward_increments(const distance_function& d,
                                                                   double tolerance = 1e-9) {
    for (int k = 1; k <= d.n; ++k) {
        const double unit = d.values[static_cast<std::size_t>(k)] - d.values[static_cast<std::size_t>(k) - 1];
        for (int l = 1; l <= k; ++l) {
            const double lhs = d.values[static_cast<std::size_t>(k)] - d.values[static_cast<std::size_t>(k - l)];
            if (lhs < l * unit - tolerance) return increment_violation{k, l, lhs, l * unit};
        }
    }
    return std::nullopt;
}

/// Scans d_k - d_{k+m} >= -m (d_k - d_{k-1}) for every k and m.
inline std::optional<increment_violation> scan_forward_increments(const distance_function& d,
                                                                  double tolerance = 1e-9) {
    for (int k = 1; k <= d.n; ++k) {
        const double unit = d.values[static_cast<std::size_t>(k)] - d.values[static_cast<std::size_t>(k) - 1];
        for (int m = 1; k + m <= d.n; ++m) {
            const double lhs = d.values[static_cast<std::size_t>(k)] - d.values[static_cast<std::size_t>(k + m)];
            if (lhs < -m * unit - tolerance) return increment_violation{k, m, lhs, -m * unit};
        }
    }
    return std::nullopt;
}

} // namespace driftlab
