#pragma once

// Prefix-tree anonymization of trace-variant queries: the semantics-aware
// algorithm (exponential selection of harmful prefixes, per-class pruning)
// and the Laplacian baseline. Both share candidate generation, noisy
// counting, pruning, and result assembly, so the only experimental
// variable between them is scoring plus exponential selection.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sacofa/dp_mech.hpp"
#include "sacofa/event_log.hpp"
#include "sacofa/rules.hpp"

namespace sacofa {

struct PruningStrategy {
    // Threshold value meaning "prune everything of this class".
    static constexpr std::uint64_t kInfinity =
        std::numeric_limits<std::uint64_t>::max();

    enum class Kind { Uniform, Semantic };

    Kind kind = Kind::Uniform;
    std::uint64_t p = 1;           // Uniform
    std::uint64_t p_harmless = 1;  // Semantic
    std::uint64_t p_harmful = 1;   // Semantic

    static PruningStrategy uniform(std::uint64_t p) {
        PruningStrategy s;
        s.kind = Kind::Uniform;
        s.p = p;
        return s;
    }

    static PruningStrategy semantic(std::uint64_t p_harmless,
                                    std::uint64_t p_harmful) {
        if (p_harmless > p_harmful)
            throw std::invalid_argument("p_harmless must be <= p_harmful");
        PruningStrategy s;
        s.kind = Kind::Semantic;
        s.p_harmless = p_harmless;
        s.p_harmful = p_harmful;
        return s;
    }

    std::uint64_t threshold(bool harmful) const {
        if (kind == Kind::Uniform) return p;
        return harmful ? p_harmful : p_harmless;
    }

    void validate() const {
        if (kind == Kind::Uniform) {
            if (p < 1) throw std::invalid_argument("pruning p must be >= 1");
        } else {
            if (p_harmless < 1 || p_harmful < 1)
                throw std::invalid_argument("pruning thresholds must be >= 1");
            if (p_harmless > p_harmful)
                throw std::invalid_argument("p_harmless must be <= p_harmful");
        }
    }
};

struct AnonymizationConfig {
    double epsilon = 1.0;
    std::uint32_t max_len = 1;  // k
    PruningStrategy pruning;
    ScoreFunction score_fn;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(epsilon > 0) || !std::isfinite(epsilon))
            throw std::invalid_argument("epsilon must be positive and finite");
        if (max_len < 1) throw std::invalid_argument("k must be >= 1");
        pruning.validate();
    }
};

struct PrefixNode {
    Variant prefix;
    std::uint64_t noisy_count = 0;
    bool harmful = false;

    std::size_t depth() const { return prefix.activities.size(); }
};

struct RunReport {
    std::uint64_t laplace_draws = 0;
    std::uint64_t exp_selections = 0;
    std::uint64_t pruned_harmless = 0;
    std::uint64_t pruned_harmful = 0;
    std::vector<std::uint64_t> candidates_per_depth;
    std::vector<std::string> warnings;
};

// Removes every node whose noisy count is below its class threshold.
// noisy_count == threshold is retained.
inline std::vector<PrefixNode> prune(const std::vector<PrefixNode>& level,
                                     const PruningStrategy& strategy,
                                     RunReport* report = nullptr) {
    std::vector<PrefixNode> kept;
    kept.reserve(level.size());
    for (const auto& node : level) {
        if (node.noisy_count < strategy.threshold(node.harmful)) {
            if (report) {
                if (node.harmful)
                    ++report->pruned_harmful;
                else
                    ++report->pruned_harmless;
            }
        } else {
            kept.push_back(node);
        }
    }
    return kept;
}

// Distribution over the retained nodes that are terminated or of depth k.
// Depth-k unterminated nodes are emitted with unknown termination.
inline VariantDistribution assemble_result(const std::vector<PrefixNode>& tree,
                                           std::uint32_t k) {
    VariantDistribution dist;
    for (const auto& node : tree) {
        if (node.prefix.terminated || node.depth() == k)
            dist.add(node.prefix, node.noisy_count);
    }
    return dist;
}

namespace detail {

// Shared tree construction. When `rules` is set, candidates are scored and
// harmful ones pass through the two-outcome exponential mechanism; when
// absent (baseline) every candidate is expanded.
inline std::pair<VariantDistribution, RunReport> build_tree(
    const EventLog& log, const AnonymizationConfig& config,
    const RuleSet* rules) {
    config.validate();
    if (log.empty()) throw std::invalid_argument("empty event log");

    RandomSource rng(config.seed);
    RunReport report;
    const double delta_s = config.score_fn.sensitivity();

    std::vector<PrefixNode> tree;
    // Frontier: retained unterminated prefixes of the previous depth, kept
    // in canonical order (activities sorted, end symbol last) so the draw
    // sequence is reproducible.
    std::vector<Variant> frontier{Variant{{}, false}};

    for (std::uint32_t n = 1; n <= config.max_len && !frontier.empty(); ++n) {
        std::vector<PrefixNode> level;
        for (const auto& parent : frontier) {
            auto expand = [&](const Variant& candidate) {
                bool harmful = false;
                if (rules) {
                    harmful = !assess_prefix(*rules, candidate).harmless();
                    if (harmful) {
                        double s = config.score_fn(*rules, candidate);
                        ++report.exp_selections;
                        if (!include_harmful(rng, s, config.score_fn.max_score(),
                                             config.epsilon, delta_s))
                            return;
                    }
                }
                PrefixNode node;
                node.prefix = candidate;
                node.harmful = harmful;
                ++report.laplace_draws;
                node.noisy_count =
                    noisy_count(rng, prefix_count(log, candidate), config.epsilon);
                level.push_back(std::move(node));
            };

            for (const auto& a : log.activity_universe) {
                Variant candidate = parent;
                candidate.activities.push_back(a);
                expand(candidate);
            }
            Variant ended = parent;
            ended.terminated = true;
            expand(ended);
        }
        if (report.candidates_per_depth.size() < n)
            report.candidates_per_depth.resize(n, 0);
        report.candidates_per_depth[n - 1] +=
            frontier.size() * (log.activity_universe.size() + 1);

        level = prune(level, config.pruning, &report);

        frontier.clear();
        for (auto& node : level) {
            if (!node.prefix.terminated) frontier.push_back(node.prefix);
            tree.push_back(std::move(node));
        }
    }

    VariantDistribution dist = assemble_result(tree, config.max_len);
    if (dist.empty())
        report.warnings.push_back("tree empty after pruning; empty result");
    return {std::move(dist), std::move(report)};
}

}  // namespace detail

// Semantics-aware anonymization: rules are derived once from the input log
// and held fixed for the whole run.
inline std::pair<VariantDistribution, RunReport> anonymize(
    const EventLog& log, const AnonymizationConfig& config) {
    RuleSet rules = derive_rules(log);
    return detail::build_tree(log, config, &rules);
}

// Laplacian prefix-tree baseline: no scoring, no exponential selection,
// uniform pruning only.
inline std::pair<VariantDistribution, RunReport> anonymize_laplace(
    const EventLog& log, double epsilon, std::uint32_t k, std::uint64_t p,
    std::uint64_t seed) {
    AnonymizationConfig config;
    config.epsilon = epsilon;
    config.max_len = k;
    config.pruning = PruningStrategy::uniform(p);
    config.seed = seed;
    return detail::build_tree(log, config, nullptr);
}

}  // namespace sacofa
