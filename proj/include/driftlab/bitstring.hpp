#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/errors.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

/// Fixed-length binary search point. Position 0 corresponds to the leftmost
/// character of the serialized form, so "1010" has bit(0) == 1, bit(1) == 0.
class bit_string {
  public:
    explicit bit_string(int n) : n_(n), words_((word_count(n)), 0) {
        if (n < 1) throw length_mismatch("bit_string: length must be >= 1");
    }

    // mask bit i (LSB = bit 0) becomes position i; requires n <= 64
    static bit_string from_mask(int n, std::uint64_t mask) {
        if (n > 64) throw length_mismatch("bit_string::from_mask: n must be <= 64");
        bit_string x(n);
        x.words_[0] = (n == 64) ? mask : (mask & ((std::uint64_t{1} << n) - 1));
        return x;
    }

    static bit_string from_string(std::string_view s) {
        bit_string x(static_cast<int>(s.size()));
        for (int i = 0; i < x.n_; ++i) {
            const char c = s[static_cast<std::size_t>(i)];
            if (c != '0' && c != '1') throw length_mismatch("bit_string: expected '0'/'1' literal");
            if (c == '1') x.set_bit(i, true);
        }
        return x;
    }

    static bit_string all_ones(int n) {
        bit_string x(n);
        for (auto& w : x.words_) w = ~std::uint64_t{0};
        x.mask_top();
        return x;
    }

    static bit_string uniform_random(int n, rng& gen) {
        bit_string x(n);
        for (auto& w : x.words_) w = gen.next_u64();
        x.mask_top();
        return x;
    }

    int size() const noexcept { return n_; }

    bool bit(int i) const noexcept {
        return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u;
    }

    void set_bit(int i, bool value) noexcept {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        auto& w = words_[static_cast<std::size_t>(i) >> 6];
        w = value ? (w | m) : (w & ~m);
    }

    void flip_bit(int i) noexcept { words_[static_cast<std::size_t>(i) >> 6] ^= std::uint64_t{1} << (i & 63); }

    int ones_count() const noexcept {
        int total = 0;
        for (const auto w : words_) total += std::popcount(w);
        return total;
    }

    int zeros_count() const noexcept { return n_ - ones_count(); }

    // number of zero-valued bits; 0 identifies the all-ones string
    int level_index() const noexcept { return n_ - ones_count(); }

    bool is_all_ones() const noexcept { return ones_count() == n_; }

    // ones among positions [begin, end)
    int ones_in_range(int begin, int end) const noexcept {
        int total = 0;
        for (int i = begin; i < end; ++i) total += bit(i);
        return total;
    }

    std::uint64_t to_mask() const {
        if (n_ > 64) throw length_mismatch("bit_string::to_mask: n must be <= 64");
        return words_[0];
    }

    std::string to_string() const {
        std::string s(static_cast<std::size_t>(n_), '0');
        for (int i = 0; i < n_; ++i)
            if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
        return s;
    }

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const bit_string& a, const bit_string& b) noexcept {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }

  private:
    static std::size_t word_count(int n) { return static_cast<std::size_t>(n + 63) / 64; }

    void mask_top() noexcept {
        const int rem = n_ & 63;
        if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
    }

    int n_;
    std::vector<std::uint64_t> words_;
};

inline int hamming_distance(const bit_string& a, const bit_string& b) {
    if (a.size() != b.size()) throw length_mismatch("hamming_distance: lengths differ");
    int total = 0;
    for (std::size_t w = 0; w < a.words().size(); ++w)
        total += std::popcount(a.words()[w] ^ b.words()[w]);
    return total;
}

enum class side_class { left_heavy, right, optimal };

/// Left half = positions 0..floor(n/2)-1. The all-ones string is its own
/// class; every other string is left_heavy when its left half holds strictly
/// more ones than its right half, and right otherwise (ties included).
inline side_class classify_side(const bit_string& x) {
    if (x.is_all_ones()) return side_class::optimal;
    const int half = x.size() / 2;
    const int left = x.ones_in_range(0, half);
    const int right = x.ones_count() - left;
    return left > right ? side_class::left_heavy : side_class::right;
}

inline constexpr int enumeration_cap = 20;

/// All C(n,k) strings with exactly k zero bits, ordered lexicographically by
/// their serialized form ("0011" < "0101" < ... < "1100").
inline std::vector<bit_string> enumerate_level(int n, int k) {
    if (n < 1 || k < 0 || k > n) throw length_mismatch("enumerate_level: need 0 <= k <= n");
    if (n > enumeration_cap) throw cap_exceeded("enumerate_level: n exceeds cap of 20");
    std::vector<bit_string> out;
    const int ones = n - k;
    // Gosper's hack walks equal-popcount masks in increasing numeric order;
    // with bit j of v holding position n-1-j, that is exactly string-lex order.
    std::uint64_t v = (ones == 0) ? 0 : ((std::uint64_t{1} << ones) - 1);
    const std::uint64_t limit = std::uint64_t{1} << n;
    for (;;) {
        bit_string x(n);
        for (int j = 0; j < n; ++j)
            if ((v >> j) & 1u) x.set_bit(n - 1 - j, true);
        out.push_back(std::move(x));
        if (ones == 0 || ones == n) break;
        const std::uint64_t c = v & (0 - v);
        const std::uint64_t r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
        if (v >= limit) break;
    }
    return out;
}

} // namespace driftlab
