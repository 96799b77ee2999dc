#include <algorithm>
#include <cmath>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "sacofa/dp_mech.hpp"

using namespace sacofa;

TEST_CASE("laplace moments match the distribution") {
    const double scale = 2.5;
    const int n = 100000;
    RandomSource rng(1234);
    double sum = 0, sum_sq = 0;
    for (int i = 0; i < n; ++i) {
        double x = laplace_noise(rng, scale);
        sum += x;
        sum_sq += x * x;
    }
    double mean = sum / n;
    double var = sum_sq / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.02 * scale);
    REQUIRE(std::abs(var - 2 * scale * scale) < 0.05 * 2 * scale * scale);
}

TEST_CASE("identical seeds give identical draw sequences") {
    RandomSource a(42), b(42);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(laplace_noise(a, 1.0) == laplace_noise(b, 1.0));
}

TEST_CASE("laplace rejects nonpositive scale") {
    RandomSource rng(0);
    REQUIRE_THROWS_AS(laplace_noise(rng, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(laplace_noise(rng, -1.0), std::invalid_argument);
}

TEST_CASE("noisy_count clamps negative draws at zero") {
    RandomSource raw_rng(7), rng(7);
    bool saw_negative = false;
    for (int i = 0; i < 1000; ++i) {
        double raw = noisy_count_raw(raw_rng, 0, 0.5);
        auto clamped = noisy_count(rng, 0, 0.5);
        if (raw <= -0.5) {
            saw_negative = true;
            REQUIRE(clamped == 0);
        }
    }
    REQUIRE(saw_negative);
}

TEST_CASE("noisy_count with huge epsilon is exact") {
    RandomSource rng(7);
    for (int i = 0; i < 100; ++i) REQUIRE(noisy_count(rng, 20, 1e6) == 20);
}

TEST_CASE("noisy_count empirical median sits at the true count") {
    RandomSource rng(99);
    std::vector<std::uint64_t> samples;
    for (int i = 0; i < 10000; ++i) samples.push_back(noisy_count(rng, 10, 1.0));
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2,
                     samples.end());
    auto median = samples[samples.size() / 2];
    REQUIRE(median >= 9);
    REQUIRE(median <= 11);
}

TEST_CASE("noisy_count distribution shifts with the true count") {
    // raw (unclamped) value for count c' is the raw value for c plus c'-c
    RandomSource a(314), b(314);
    for (int i = 0; i < 1000; ++i) {
        double x = noisy_count_raw(a, 3, 1.0);
        double y = noisy_count_raw(b, 8, 1.0);
        REQUIRE_THAT(y - x, Catch::Matchers::WithinAbs(5.0, 1e-9));
    }
}

TEST_CASE("exp_select with equal scores is uniform") {
    RandomSource rng(5);
    int first = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        if (exp_select(rng, {1.0, 1.0}, 1.0, 1.0) == 0) ++first;
    REQUIRE(std::abs(first / double(n) - 0.5) < 0.02);
}

TEST_CASE("exp_select two-outcome frequency ratio matches closed form") {
    // s1=1, s2=0, eps=2, delta_s=1 -> ratio e^1
    RandomSource rng(8);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (exp_select(rng, {1.0, 0.0}, 2.0, 1.0) == 0) ++hits;
    double ratio = hits / double(n - hits);
    REQUIRE(std::abs(ratio - std::exp(1.0)) < 0.1 * std::exp(1.0));
}

TEST_CASE("exp_select single outcome and errors") {
    RandomSource rng(2);
    REQUIRE(exp_select(rng, {0.3}, 1.0, 1.0) == 0);
    REQUIRE_THROWS_AS(exp_select(rng, {}, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(exp_select(rng, {1.0, 2.0}, -1.0, 1.0),
                      std::invalid_argument);
}

TEST_CASE("exp_select is shift invariant") {
    RandomSource a(77), b(77);
    std::vector<double> scores = {0.0, 1.5, 3.0, 0.5};
    std::vector<double> shifted = {10.0, 11.5, 13.0, 10.5};
    for (int i = 0; i < 5000; ++i)
        REQUIRE(exp_select(a, scores, 1.0, 3.0) ==
                exp_select(b, shifted, 1.0, 3.0));
}

TEST_CASE("exp_select survives extreme scores without overflow") {
    RandomSource rng(3);
    std::vector<double> scores = {1e6, 1e6 - 1, 0.0};
    for (int i = 0; i < 100; ++i) {
        auto idx = exp_select(rng, scores, 10.0, 1.0);
        REQUIRE(idx <= 1);  // third outcome has vanishing weight
    }
}

TEST_CASE("include_harmful with equal scores is a fair coin") {
    RandomSource rng(6);
    const int n = 10000;
    int in = 0;
    for (int i = 0; i < n; ++i)
        if (include_harmful(rng, 1.0, 1.0, 1.0, 1.0)) ++in;
    REQUIRE(std::abs(in / double(n) - 0.5) < 0.02);
}

TEST_CASE("include_harmful binary-mode closed-form probability") {
    // score 0 vs max 1, eps=1: P(include) = 1 / (1 + e^{0.5})
    RandomSource rng(9);
    const int n = 100000;
    int in = 0;
    for (int i = 0; i < n; ++i)
        if (include_harmful(rng, 0.0, 1.0, 1.0, 1.0)) ++in;
    double expected = 1.0 / (1.0 + std::exp(0.5));
    REQUIRE(std::abs(in / double(n) - expected) < 0.02);
}

TEST_CASE("include_harmful vanishes for large epsilon") {
    RandomSource rng(10);
    for (int i = 0; i < 1000; ++i)
        REQUIRE_FALSE(include_harmful(rng, 0.0, 1.0, 1e6, 1.0));
}
