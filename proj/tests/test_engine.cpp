#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "driftlab/engine.hpp"
#include "driftlab/oracle.hpp"

using namespace driftlab;

TEST_CASE("mutate flips the single bit when n = 1", "[engine]") {
    rng gen(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = bit_string::from_string(trial % 2 ? "1" : "0");
        const auto child = mutate(x, gen);
        CHECK(child.bit(0) != x.bit(0));
    }
}

TEST_CASE("mutate leaves the parent unmodified", "[engine]") {
    rng gen(2);
    const auto x = bit_string::from_string("0101010");
    const auto copy = x;
    (void)mutate(x, gen);
    CHECK(x == copy);
}

TEST_CASE("mutate matches the mask law at n = 2", "[engine]") {
    // each bit flips independently with probability 1/2, so P(child = 11) = 1/4
    rng gen(3);
    const auto x = bit_string::from_string("00");
    const int samples = 1000000;
    int both = 0;
    for (int i = 0; i < samples; ++i)
        if (mutate(x, gen).ones_count() == 2) ++both;
    const double p = static_cast<double>(both) / samples;
    const double sigma = std::sqrt(0.25 * 0.75 / samples);
    CHECK(std::abs(p - 0.25) < 3 * sigma);
}

TEST_CASE("mutate shows no positional bias", "[engine]") {
    rng gen(14);
    const int n = 16, samples = 400000;
    const auto zero = bit_string(n);
    std::vector<int> flips(n, 0);
    int both_first_and_last = 0;
    for (int i = 0; i < samples; ++i) {
        const auto child = mutate(zero, gen);
        for (int b = 0; b < n; ++b) flips[b] += child.bit(b);
        both_first_and_last += child.bit(0) && child.bit(n - 1);
    }
    const double p = 1.0 / n;
    const double sigma_pos = std::sqrt(p * (1 - p) / samples);
    for (int b = 0; b < n; ++b) {
        INFO("position " << b);
        CHECK(std::abs(static_cast<double>(flips[b]) / samples - p) < 4 * sigma_pos);
    }
    // independence across positions: P(flip first and flip last) = 1/n^2
    const double pp = p * p;
    const double sigma_pair = std::sqrt(pp * (1 - pp) / samples);
    CHECK(std::abs(static_cast<double>(both_first_and_last) / samples - pp) < 4 * sigma_pair);
}

TEST_CASE("mutate flips one bit per call on average", "[engine]") {
    rng gen(4);
    const int n = 5, samples = 1000000;
    const auto x = bit_string(n);
    long long flips = 0;
    for (int i = 0; i < samples; ++i) flips += mutate(x, gen).ones_count();
    const double mean = static_cast<double>(flips) / samples;
    const double sigma = std::sqrt(n * (1.0 / n) * (1.0 - 1.0 / n) / samples);
    CHECK(std::abs(mean - 1.0) < 3 * sigma);
}

TEST_CASE("select is strictly elitist", "[engine]") {
    rng gen(5);
    const auto f = fitness_function::one_max(3);
    const auto parent = bit_string::from_string("110"); // fitness 2
    const std::vector<bit_string> children{bit_string::from_string("011"),  // fitness 2 (tie)
                                           bit_string::from_string("100")}; // fitness 1
    CHECK(&select(parent, children, f, gen) == &parent);

    const auto low_parent = bit_string::from_string("000");
    const std::vector<bit_string> improving{bit_string::from_string("100"),
                                            bit_string::from_string("000")};
    CHECK(select(low_parent, improving, f, gen) == improving[0]);
}

TEST_CASE("select splits ties uniformly", "[engine]") {
    rng gen(6);
    const auto f = fitness_function::one_max(2);
    const auto parent = bit_string::from_string("00");
    const std::vector<bit_string> children{bit_string::from_string("10"),
                                           bit_string::from_string("01")};
    const int trials = 100000;
    int first = 0;
    for (int i = 0; i < trials; ++i)
        if (&select(parent, children, f, gen) == &children[0]) ++first;
    const double p = static_cast<double>(first) / trials;
    const double sigma = std::sqrt(0.25 / trials);
    CHECK(std::abs(p - 0.5) < 3 * sigma);
}

TEST_CASE("run_ea hits deterministically at n = 1", "[engine]") {
    ea_config cfg{fitness_function::one_max(1), 1, 0, false, bit_string::from_string("0")};
    const auto record = run_ea(cfg, 77);
    CHECK(record.generations == 1);
    CHECK(record.evaluations == 1);
    CHECK(record.hit_optimum);
}

TEST_CASE("run_ea stops before mutating when the start is optimal", "[engine]") {
    ea_config cfg{fitness_function::one_max(6), 3, 0, true, bit_string::all_ones(6)};
    const auto record = run_ea(cfg, 8);
    CHECK(record.generations == 0);
    CHECK(record.evaluations == 0);
    CHECK(record.hit_optimum);
    REQUIRE(record.trajectory.size() == 1);
    CHECK(record.trajectory[0].is_all_ones());
}

TEST_CASE("mean generations at n = 2 matches the hand-solved chain", "[engine]") {
    // g(k=1) = g(k=2) = 4, uniform average (1/4)*0 + (3/4)*4 = 3
    ea_config cfg{fitness_function::one_max(2), 1, 0, false, std::nullopt};
    const auto stats = batch_run(cfg, 1000000, 99);
    CHECK(stats.timeout_count == 0);
    CHECK(std::abs(stats.mean_generations - 3.0) < 3 * stats.std_error_generations);
}

TEST_CASE("batch_run is deterministic and order-free", "[engine]") {
    ea_config cfg{fitness_function::one_max(5), 2, 0, false, std::nullopt};
    const auto a = batch_run(cfg, 500, 4242);
    const auto b = batch_run(cfg, 500, 4242);
    CHECK(a.mean_generations == b.mean_generations);
    CHECK(a.std_error_generations == b.std_error_generations);
    CHECK(a.timeout_count == b.timeout_count);

    const auto single = batch_run(cfg, 1, 4242);
    const auto record = run_ea(cfg, mix64(4242 ^ mix64(1)));
    CHECK(single.mean_generations == static_cast<double>(record.generations));
    CHECK(single.std_error_generations == 0.0);
}

TEST_CASE("evaluations always equal generations times N", "[engine]") {
    for (int N : {1, 3}) {
        ea_config cfg{fitness_function::bin_val(6), N, 0, false, std::nullopt};
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto record = run_ea(cfg, seed);
            CHECK(record.evaluations == record.generations * static_cast<std::uint64_t>(N));
        }
    }
}

TEST_CASE("batch mean agrees with the exact chain at n = 8", "[engine]") {
    const double exact =
        exact_hitting_time(build_lumped_one_max_model(8, 1)).uniform_average;
    ea_config cfg{fitness_function::one_max(8), 1, 0, false, std::nullopt};
    const auto stats = batch_run(cfg, 100000, 2718);
    CHECK(stats.timeout_count == 0);
    CHECK(std::abs(stats.mean_generations - exact) < 3 * stats.std_error_generations);
}

TEST_CASE("parent fitness is monotone along trajectories", "[engine]") {
    const auto f = fitness_function::bin_val(8);
    ea_config cfg{f, 2, 0, true, std::nullopt};
    for (std::uint64_t seed : {11, 12, 13}) {
        const auto record = run_ea(cfg, seed);
        REQUIRE(record.hit_optimum);
        for (std::size_t t = 1; t < record.trajectory.size(); ++t) {
            const auto prev = f.evaluate(record.trajectory[t - 1]);
            const auto curr = f.evaluate(record.trajectory[t]);
            CHECK(!(curr < prev));
            if (!(record.trajectory[t] == record.trajectory[t - 1])) CHECK(prev < curr);
        }
    }
}

TEST_CASE("one-max levels never increase along a trajectory", "[engine]") {
    ea_config cfg{fitness_function::one_max(8), 3, 0, true, std::nullopt};
    for (std::uint64_t seed : {21, 22, 23}) {
        const auto record = run_ea(cfg, seed);
        for (std::size_t t = 1; t < record.trajectory.size(); ++t)
            CHECK(record.trajectory[t].level_index() <= record.trajectory[t - 1].level_index());
    }
}

TEST_CASE("timeouts are flagged, not thrown", "[engine]") {
    ea_config cfg{fitness_function::one_max(30), 1, 3, false, bit_string(30)};
    const auto record = run_ea(cfg, 55);
    CHECK_FALSE(record.hit_optimum);
    CHECK(record.generations == 3);
    CHECK(record.evaluations == 3);
}

TEST_CASE("no timeouts at the theta(n log n) scale", "[engine]") {
    // max_generations = 100 n ln n is far above the expected hitting time
    const int n = 8;
    const auto cap = static_cast<std::uint64_t>(100.0 * n * std::log(n));
    ea_config cfg{fitness_function::one_max(n), 1, cap, false, std::nullopt};
    const auto stats = batch_run(cfg, 10000, 31415);
    CHECK(stats.timeout_count == 0);
}
