#pragma once

// Seeded randomness and the two differential-privacy primitives:
// Laplace noise and exponential-mechanism selection.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace sacofa {

// Deterministic random source. Uniform doubles are produced directly from
// the engine's bit stream, so identical seeds give identical draw sequences
// on every platform (std::uniform_real_distribution makes no such promise).
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // uniform in [0, 1) with 53 bits of precision
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_raw() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// One draw from Laplace(0, scale) via inverse CDF.
inline double laplace_noise(RandomSource& rng, double scale) {
    if (!(scale > 0)) throw std::invalid_argument("laplace scale must be > 0");
    double u = rng.uniform() - 0.5;  // [-0.5, 0.5)
    if (u >= 0) return -scale * std::log(1.0 - 2.0 * u);
    return scale * std::log(1.0 + 2.0 * u);
}

// Unclamped noisy value; exposed for distribution-shift tests.
inline double noisy_count_raw(RandomSource& rng, std::uint64_t true_count,
                              double epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
    return static_cast<double>(true_count) + laplace_noise(rng, 1.0 / epsilon);
}

// [tau + Lap(1/eps)] rounded half-away-from-zero, clamped at 0.
inline std::uint64_t noisy_count(RandomSource& rng, std::uint64_t true_count,
                                 double epsilon) {
    double noisy = noisy_count_raw(rng, true_count, epsilon);
    double rounded = std::round(noisy);
    if (rounded <= 0) return 0;
    return static_cast<std::uint64_t>(rounded);
}

// Exponential mechanism over scored outcomes: index i is returned with
// probability proportional to exp(eps * s_i / (2 * delta_s)). Scores are
// shifted by their maximum before exponentiation.
inline std::size_t exp_select(RandomSource& rng,
                              const std::vector<double>& scores, double epsilon,
                              double delta_s) {
    if (scores.empty())
        throw std::invalid_argument("exp_select over empty outcome set");
    if (!(epsilon > 0) || !(delta_s > 0))
        throw std::invalid_argument("epsilon and delta_s must be > 0");

    double max_score = scores[0];
    for (double s : scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
        max_score = std::max(max_score, s);
    }
    std::vector<double> weights(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        weights[i] = std::exp(epsilon * (scores[i] - max_score) / (2.0 * delta_s));
        total += weights[i];
    }
    double target = rng.uniform() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (target < cum) return i;
    }
    return weights.size() - 1;
}

// Two-outcome exponential mechanism deciding whether a harmful candidate
// joins the tree: {include: score_value, exclude: score_max}. Lower-scored
// (more harmful) candidates are exponentially less likely to be included.
inline bool include_harmful(RandomSource& rng, double score_value,
                            double score_max, double epsilon, double delta_s) {
    if (score_value < 0 || score_value > score_max)
        throw std::invalid_argument("score outside [0, score_max]");
    return exp_select(rng, {score_value, score_max}, epsilon, delta_s) == 0;
}

}  // namespace sacofa
