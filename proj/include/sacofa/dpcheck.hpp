#pragma once

// Monte Carlo neighboring-log smoke test: runs the anonymizer many times on
// a fixed micro instance and on a neighbor differing by one added trace,
// then checks that the empirical probability of every output event
// (presence of each variant) respects the e^epsilon bound both ways,
// up to 3-sigma binomial slack.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sacofa/anonymize.hpp"
#include "sacofa/event_log.hpp"

namespace sacofa {

struct DpCheckConfig {
    std::uint64_t runs = 100000;  // per log
    double epsilon = 1.0;
    std::uint64_t seed = 1;
};

struct DpCheckEvent {
    Variant variant;
    double freq_base = 0.0;
    double freq_neighbor = 0.0;
    double worst_margin = 0.0;  // max over both directions of f - (e^eps*g + slack)
    bool ok = true;
};

struct DpCheckResult {
    std::vector<DpCheckEvent> events;
    bool passed = true;
    std::uint64_t runs = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline EventLog micro_log(bool with_extra_trace) {
    // Two activities; every pair relation is Sometimes or Never in both
    // logs, and the neighbor trace repeats an existing variant, so the rule
    // sets of the two logs coincide.
    EventLog log;
    auto add = [&](std::vector<Activity> acts) {
        Trace t;
        t.case_id = "c" + std::to_string(log.traces.size());
        t.activities = std::move(acts);
        log.traces.push_back(std::move(t));
    };
    for (int i = 0; i < 4; ++i) add({"a", "b"});
    for (int i = 0; i < 3; ++i) add({"b", "a"});
    for (int i = 0; i < 2; ++i) add({"a"});
    for (int i = 0; i < 2; ++i) add({"b"});
    if (with_extra_trace) add({"a", "b"});
    log.activity_universe = {"a", "b"};
    return log;
}

}  // namespace detail

inline DpCheckResult run_dp_check(const DpCheckConfig& cfg) {
    EventLog base = detail::micro_log(false);
    EventLog neighbor = detail::micro_log(true);

    AnonymizationConfig run_cfg;
    run_cfg.epsilon = cfg.epsilon;
    run_cfg.max_len = 2;
    run_cfg.pruning = PruningStrategy::uniform(1);
    run_cfg.score_fn.mode = ScoreFunction::Mode::Binary;

    std::map<Variant, std::uint64_t> hits_base, hits_neighbor;
    auto sample = [&](const EventLog& log, std::uint64_t salt,
                      std::map<Variant, std::uint64_t>& hits) {
        for (std::uint64_t i = 0; i < cfg.runs; ++i) {
            run_cfg.seed = detail::splitmix64(cfg.seed ^ salt ^ (i * 0x51ed2701ULL));
            auto [dist, report] = anonymize(log, run_cfg);
            for (const auto& [v, c] : dist.entries()) ++hits[v];
        }
    };
    sample(base, 0x1111111111111111ULL, hits_base);
    sample(neighbor, 0x2222222222222222ULL, hits_neighbor);

    std::map<Variant, std::pair<std::uint64_t, std::uint64_t>> merged;
    for (const auto& [v, h] : hits_base) merged[v].first = h;
    for (const auto& [v, h] : hits_neighbor) merged[v].second = h;

    const double n = static_cast<double>(cfg.runs);
    const double bound = std::exp(cfg.epsilon);
    auto sigma = [&](double f) { return std::sqrt(f * (1.0 - f) / n); };

    DpCheckResult result;
    result.runs = cfg.runs;
    for (const auto& [v, counts] : merged) {
        DpCheckEvent ev;
        ev.variant = v;
        ev.freq_base = counts.first / n;
        ev.freq_neighbor = counts.second / n;
        double slack_fwd = 3.0 * (sigma(ev.freq_base) + bound * sigma(ev.freq_neighbor));
        double slack_bwd = 3.0 * (sigma(ev.freq_neighbor) + bound * sigma(ev.freq_base));
        double margin_fwd = ev.freq_base - (bound * ev.freq_neighbor + slack_fwd);
        double margin_bwd = ev.freq_neighbor - (bound * ev.freq_base + slack_bwd);
        ev.worst_margin = std::max(margin_fwd, margin_bwd);
        ev.ok = ev.worst_margin <= 0.0;
        if (!ev.ok) result.passed = false;
        result.events.push_back(std::move(ev));
    }
    return result;
}

}  // namespace sacofa
