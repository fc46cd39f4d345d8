#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "driftlab/bitstring.hpp"
#include "driftlab/errors.hpp"

namespace driftlab {

/// Exactly comparable fitness scalar. Integer-valued functions use the
/// uint64 alternative so that equal fitness means equal, never "close";
/// float-valued functions (the nonlinear example, tables) compare bit-exact.
using fitness_value = std::variant<std::uint64_t, double>;

inline double fitness_as_double(const fitness_value& v) {
    return std::holds_alternative<std::uint64_t>(v)
               ? static_cast<double>(std::get<std::uint64_t>(v))
               : std::get<double>(v);
}

inline std::string fitness_to_string(const fitness_value& v) {
    if (std::holds_alternative<std::uint64_t>(v)) return std::to_string(std::get<std::uint64_t>(v));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(v));
    return buf;
}

enum class fitness_kind { one_max, bin_val, linear, nonlinear_example, table };

inline constexpr int exhaustive_check_cap = 12; // property checkers enumerate 2^n states

class fitness_function {
  public:
    static fitness_function one_max(int n) { return fitness_function(fitness_kind::one_max, n); }

    static fitness_function bin_val(int n) {
        if (n > 63) throw config_error("bin_val: n must be <= 63 (values held in 64-bit integers)");
        return fitness_function(fitness_kind::bin_val, n);
    }

    // weights may be in any order (the checkers need unsorted material);
    // each weight must be a positive integer
    static fitness_function linear(std::vector<std::uint64_t> weights) {
        fitness_function f(fitness_kind::linear, static_cast<int>(weights.size()));
        std::uint64_t total = 0;
        for (const auto w : weights) {
            if (w == 0) throw config_error("linear: weights must be positive");
            if (total > UINT64_MAX - w) throw config_error("linear: weight sum overflows 64 bits");
            total += w;
        }
        f.weights_ = std::move(weights);
        return f;
    }

    static fitness_function sorted_linear(std::vector<std::uint64_t> weights) {
        for (std::size_t i = 1; i < weights.size(); ++i)
            if (weights[i - 1] < weights[i])
                throw config_error("sorted_linear: weights must be non-increasing");
        return linear(std::move(weights));
    }

    // defined for even n; double precision only, so large n collapses the
    // small terms into the exp term (see check_linear_like findings)
    static fitness_function nonlinear_example(int n) {
        if (n % 2 != 0) throw config_error("nonlinear_example: n must be even");
        if (n > exhaustive_check_cap) throw cap_exceeded("nonlinear_example: n must be <= 12");
        return fitness_function(fitness_kind::nonlinear_example, n);
    }

    static fitness_function table(int n, std::map<std::string, double> values) {
        if (n > enumeration_cap) throw cap_exceeded("table: n exceeds enumeration cap");
        fitness_function f(fitness_kind::table, n);
        f.table_.assign(std::size_t{1} << n, 0.0);
        std::vector<char> seen(std::size_t{1} << n, 0);
        for (const auto& [literal, value] : values) {
            if (static_cast<int>(literal.size()) != n)
                throw config_error("table: literal '" + literal + "' has wrong length");
            if (std::isnan(value)) throw config_error("table: values must not be NaN");
            const auto mask = bit_string::from_string(literal).to_mask();
            f.table_[mask] = value;
            seen[mask] = 1;
        }
        for (const auto s : seen)
            if (!s) throw config_error("table: every bit-string literal must be assigned a value");
        return f;
    }

    int n() const noexcept { return n_; }
    fitness_kind kind() const noexcept { return kind_; }
    const std::vector<std::uint64_t>& weights() const noexcept { return weights_; }

    std::string name() const {
        switch (kind_) {
            case fitness_kind::one_max: return "onemax";
            case fitness_kind::bin_val: return "binval";
            case fitness_kind::linear: return "linear";
            case fitness_kind::nonlinear_example: return "nonlinear";
            case fitness_kind::table: return "table";
        }
        return "?";
    }

    fitness_value evaluate(const bit_string& x) const {
        if (x.size() != n_) throw length_mismatch("evaluate: bit string length does not match");
        switch (kind_) {
            case fitness_kind::one_max:
                return static_cast<std::uint64_t>(x.ones_count());
            case fitness_kind::bin_val: {
                // f = sum over set positions i (1-based) of 2^(n-i)
                std::uint64_t v = 0;
                for (int i = 0; i < n_; ++i)
                    if (x.bit(i)) v |= std::uint64_t{1} << (n_ - 1 - i);
                return v;
            }
            case fitness_kind::linear: {
                std::uint64_t v = 0;
                for (int i = 0; i < n_; ++i)
                    if (x.bit(i)) v += weights_[static_cast<std::size_t>(i)];
                return v;
            }
            case fitness_kind::nonlinear_example: {
                const int half = n_ / 2;
                double exponent = 0.0;
                for (int i = 0; i < half; ++i)
                    if (x.bit(i)) exponent += std::ldexp(1.0, n_ - 1 - i);
                int right_ones = 0;
                for (int i = half; i < n_; ++i) right_ones += x.bit(i);
                int leading_ones = 0;
                while (leading_ones < n_ && x.bit(leading_ones)) ++leading_ones;
                return std::exp(exponent) + std::log(right_ones + 1.0) + leading_ones;
            }
            case fitness_kind::table:
                return table_[x.to_mask()];
        }
        throw config_error("evaluate: unknown kind");
    }

    fitness_value max_value() const {
        switch (kind_) {
            case fitness_kind::one_max:
                return static_cast<std::uint64_t>(n_);
            case fitness_kind::bin_val:
                return (std::uint64_t{1} << n_) - 1;
            case fitness_kind::linear: {
                std::uint64_t total = 0;
                for (const auto w : weights_) total += w;
                return total;
            }
            case fitness_kind::nonlinear_example:
                return evaluate(bit_string::all_ones(n_));
            case fitness_kind::table:
                return *std::max_element(table_.begin(), table_.end());
        }
        throw config_error("max_value: unknown kind");
    }

  private:
    fitness_function(fitness_kind kind, int n) : kind_(kind), n_(n) {
        if (n < 1) throw config_error("fitness_function: n must be >= 1");
    }

    fitness_kind kind_;
    int n_;
    std::vector<std::uint64_t> weights_; // linear
    std::vector<double> table_;          // table, indexed by mask
};

/// Result of an exhaustive property check. condition_id: 0 = monotonicity,
/// 1..3 = the three left-shift conditions. The witness re-evaluates to the
/// recorded violation (see witness_reproduces).
struct property_report {
    bool holds = true;
    int condition_id = -1;
    std::vector<bit_string> witness; // 2 strings, or 4 for condition 3
    std::string detail;
};

namespace detail {

inline std::vector<fitness_value> evaluate_all(const fitness_function& f) {
    const int n = f.n();
    if (n > exhaustive_check_cap) throw cap_exceeded("exhaustive check: n exceeds cap of 12");
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<fitness_value> values;
    values.reserve(count);
    for (std::uint64_t m = 0; m < count; ++m) values.push_back(f.evaluate(bit_string::from_mask(n, m)));
    return values;
}

} // namespace detail

/// f is monotonic iff f(x) > f(y) whenever x dominates y. Enumerates every
/// dominated pair (3^n of them); single-bit drops are scanned first so a
/// failing report carries an adjacent pair as its witness.
inline property_report check_monotonic(const fitness_function& f) {
    const auto values = detail::evaluate_all(f);
    const int n = f.n();
    const std::uint64_t count = std::uint64_t{1} << n;
    property_report report;
    const auto violation_at = [&](std::uint64_t x, std::uint64_t y) {
        report.holds = false;
        report.condition_id = 0;
        report.witness = {bit_string::from_mask(n, x), bit_string::from_mask(n, y)};
        report.detail = "f(" + report.witness[0].to_string() + ") = " + fitness_to_string(values[x]) +
                        " is not greater than f(" + report.witness[1].to_string() + ") = " +
                        fitness_to_string(values[y]) + " although the first dominates the second";
    };
    for (std::uint64_t x = 1; x < count; ++x) {
        for (int i = n - 1; i >= 0; --i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            if (!(x & bit)) continue;
            if (!(values[x] > values[x ^ bit])) {
                violation_at(x, x ^ bit);
                return report;
            }
        }
    }
    for (std::uint64_t x = 1; x < count; ++x) {
        for (std::uint64_t drop = x; drop != 0; drop = (drop - 1) & x) {
            const std::uint64_t y = x ^ drop;
            if (!(values[x] > values[y])) {
                violation_at(x, y);
                return report;
            }
        }
    }
    return report;
}

namespace detail {

struct shift_record {
    fitness_value before, after;
    std::uint64_t mask;
    int zero_pos, one_pos;
};

} // namespace detail

/// Checks the three conditions in order and reports the first violation:
///   1. setting any zero bit strictly increases f;
///   2. moving a one bit left (f(A0B1C) <= f(A1B0C)) never decreases f;
///   3. for each fixed pair of special-bit positions, the left-shift map
///      preserves strict order across all contexts: f(D0E1F) < f(A0B1C)
///      implies f(D1E0F) < f(A1B0C).
/// Condition 3 is indexed by the (zero-position, one-position) pair; within
/// one pair it holds iff the after-values are strictly ordered across
/// strictly ordered before-values, which a sort settles in O(2^n n^2).
inline property_report check_linear_like(const fitness_function& f) {
    const auto values = detail::evaluate_all(f);
    const int n = f.n();
    const std::uint64_t count = std::uint64_t{1} << n;
    property_report report;

    // condition 1
    for (std::uint64_t x = 0; x < count; ++x) {
        for (int i = 0; i < n; ++i) {
            if ((x >> i) & 1u) continue;
            const std::uint64_t y = x | (std::uint64_t{1} << i);
            if (!(values[x] < values[y])) {
                report.holds = false;
                report.condition_id = 1;
                report.witness = {bit_string::from_mask(n, x), bit_string::from_mask(n, y)};
                report.detail = "condition 1: f(" + report.witness[0].to_string() +
                                ") = " + fitness_to_string(values[x]) + " is not less than f(" +
                                report.witness[1].to_string() + ") = " + fitness_to_string(values[y]);
                return report;
            }
        }
    }

    // condition 2
    for (std::uint64_t x = 0; x < count; ++x) {
        for (int i = 0; i < n; ++i) {
            if ((x >> i) & 1u) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!((x >> j) & 1u)) continue;
                const std::uint64_t shifted = (x | (std::uint64_t{1} << i)) & ~(std::uint64_t{1} << j);
                if (values[shifted] < values[x]) {
                    report.holds = false;
                    report.condition_id = 2;
                    report.witness = {bit_string::from_mask(n, x), bit_string::from_mask(n, shifted)};
                    report.detail = "condition 2: f(" + report.witness[0].to_string() +
                                    ") = " + fitness_to_string(values[x]) + " exceeds f(" +
                                    report.witness[1].to_string() + ") = " + fitness_to_string(values[shifted]);
                    return report;
                }
            }
        }
    }

    // condition 3, one position pair at a time
    std::vector<detail::shift_record> records;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            records.clear();
            for (std::uint64_t x = 0; x < count; ++x) {
                if ((x >> i) & 1u) continue;
                if (!((x >> j) & 1u)) continue;
                const std::uint64_t shifted = (x | (std::uint64_t{1} << i)) & ~(std::uint64_t{1} << j);
                records.push_back({values[x], values[shifted], x, i, j});
            }
            std::sort(records.begin(), records.end(),
                      [](const auto& a, const auto& b) { return a.before < b.before; });
            std::size_t group_begin = 0;
            while (group_begin < records.size()) {
                std::size_t group_end = group_begin + 1;
                while (group_end < records.size() &&
                       records[group_end].before == records[group_begin].before)
                    ++group_end;
                if (group_end < records.size()) {
                    // compare max-after of this group with min-after of the next
                    const auto max_here = std::max_element(
                        records.begin() + static_cast<std::ptrdiff_t>(group_begin),
                        records.begin() + static_cast<std::ptrdiff_t>(group_end),
                        [](const auto& a, const auto& b) { return a.after < b.after; });
                    std::size_t next_end = group_end + 1;
                    while (next_end < records.size() &&
                           records[next_end].before == records[group_end].before)
                        ++next_end;
                    const auto min_next = std::min_element(
                        records.begin() + static_cast<std::ptrdiff_t>(group_end),
                        records.begin() + static_cast<std::ptrdiff_t>(next_end),
                        [](const auto& a, const auto& b) { return a.after < b.after; });
                    if (!(max_here->after < min_next->after)) {
                        const std::uint64_t bit_i = std::uint64_t{1} << i;
                        const std::uint64_t bit_j = std::uint64_t{1} << j;
                        const std::uint64_t lo = max_here->mask;
                        const std::uint64_t hi = min_next->mask;
                        report.holds = false;
                        report.condition_id = 3;
                        report.witness = {bit_string::from_mask(n, lo),
                                          bit_string::from_mask(n, (lo | bit_i) & ~bit_j),
                                          bit_string::from_mask(n, hi),
                                          bit_string::from_mask(n, (hi | bit_i) & ~bit_j)};
                        report.detail =
                            "condition 3: f(" + report.witness[0].to_string() + ") < f(" +
                            report.witness[2].to_string() + ") but the shifted pair compares f(" +
                            report.witness[1].to_string() + ") = " + fitness_to_string(max_here->after) +
                            " against f(" + report.witness[3].to_string() + ") = " +
                            fitness_to_string(min_next->after);
                        return report;
                    }
                }
                group_begin = group_end;
            }
        }
    }
    return report;
}

/// Re-evaluates a failed report's witness; true when the violation is real.
inline bool witness_reproduces(const fitness_function& f, const property_report& report) {
    if (report.holds || report.witness.empty()) return false;
    const auto value = [&f](const bit_string& x) { return f.evaluate(x); };
    switch (report.condition_id) {
        case 0: return !(value(report.witness[0]) > value(report.witness[1]));
        case 1: return !(value(report.witness[0]) < value(report.witness[1]));
        case 2: return value(report.witness[1]) < value(report.witness[0]);
        case 3:
            return value(report.witness[0]) < value(report.witness[2]) &&
                   !(value(report.witness[1]) < value(report.witness[3]));
        default: return false;
    }
}

} // namespace driftlab
