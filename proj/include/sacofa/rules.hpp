#pragma once

// Behavioral rules: always/sometimes/never eventually-follows and
// eventually-precedes relations derived from a log, and harm scoring of
// prefixes against them.

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sacofa/event_log.hpp"

namespace sacofa {

enum class RelationKind { Always, Sometimes, Never };

inline char relation_code(RelationKind k) {
    switch (k) {
        case RelationKind::Always: return 'A';
        case RelationKind::Sometimes: return 'S';
        case RelationKind::Never: return 'N';
    }
    return '?';
}

struct HarmAssessment {
    std::uint64_t violation_count = 0;
    bool harmless() const { return violation_count == 0; }
};

// Total relations over universe x universe. follows(a1,a2) classifies
// whether occurrences of a1 are eventually followed by a2; precedes(a1,a2)
// whether occurrences of a1 have a2 somewhere strictly before. Both are
// per-occurrence: Always means every occurrence, Never means none.
class RuleSet {
public:
    RuleSet(std::vector<Activity> universe,
            std::map<std::pair<Activity, Activity>, RelationKind> follows,
            std::map<std::pair<Activity, Activity>, RelationKind> precedes)
        : universe_(std::move(universe)),
          follows_(std::move(follows)),
          precedes_(std::move(precedes)) {}

    const std::vector<Activity>& universe() const { return universe_; }

    RelationKind follows(const Activity& a1, const Activity& a2) const {
        return lookup(follows_, a1, a2);
    }
    RelationKind precedes(const Activity& a1, const Activity& a2) const {
        return lookup(precedes_, a1, a2);
    }

    bool contains(const Activity& a) const {
        return std::binary_search(universe_.begin(), universe_.end(), a);
    }

private:
    static RelationKind lookup(
        const std::map<std::pair<Activity, Activity>, RelationKind>& m,
        const Activity& a1, const Activity& a2) {
        auto it = m.find({a1, a2});
        if (it == m.end())
            throw std::invalid_argument("unknown activity pair (" + a1 + ", " +
                                        a2 + ")");
        return it->second;
    }

    std::vector<Activity> universe_;
    std::map<std::pair<Activity, Activity>, RelationKind> follows_;
    std::map<std::pair<Activity, Activity>, RelationKind> precedes_;
};

inline RuleSet derive_rules(const EventLog& log) {
    if (log.empty())
        throw std::invalid_argument("cannot derive rules from an empty log");

    const auto& universe = log.activity_universe;
    const std::size_t n = universe.size();
    auto index_of = [&](const Activity& a) {
        return static_cast<std::size_t>(
            std::lower_bound(universe.begin(), universe.end(), a) -
            universe.begin());
    };

    // Per ordered pair (a1, a2): how many occurrences of a1 exist, and how
    // many of them have a2 after (for follows) or before (for precedes).
    std::vector<std::uint64_t> occurrences(n, 0);
    std::vector<std::uint64_t> followed(n * n, 0);
    std::vector<std::uint64_t> preceded(n * n, 0);

    std::vector<char> seen(n);
    for (const auto& t : log.traces) {
        // suffix pass: for each position, which activities occur after it
        std::fill(seen.begin(), seen.end(), 0);
        for (std::size_t i = t.activities.size(); i-- > 0;) {
            std::size_t a = index_of(t.activities[i]);
            ++occurrences[a];
            for (std::size_t b = 0; b < n; ++b)
                if (seen[b]) ++followed[a * n + b];
            seen[a] = 1;
        }
        // prefix pass: which activities occur before each position
        std::fill(seen.begin(), seen.end(), 0);
        for (std::size_t i = 0; i < t.activities.size(); ++i) {
            std::size_t a = index_of(t.activities[i]);
            for (std::size_t b = 0; b < n; ++b)
                if (seen[b]) ++preceded[a * n + b];
            seen[a] = 1;
        }
    }

    auto classify = [](std::uint64_t hits, std::uint64_t total) {
        if (hits == 0) return RelationKind::Never;
        if (hits == total) return RelationKind::Always;
        return RelationKind::Sometimes;
    };

    std::map<std::pair<Activity, Activity>, RelationKind> follows, precedes;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            follows[{universe[a], universe[b]}] =
                classify(followed[a * n + b], occurrences[a]);
            precedes[{universe[a], universe[b]}] =
                classify(preceded[a * n + b], occurrences[a]);
        }
    }
    return RuleSet(universe, std::move(follows), std::move(precedes));
}

// Counts rule violations detectable on a prefix:
//  - each ordered occurrence pair (i < j) whose before/after pattern is
//    forbidden by a Never rule counts once;
//  - Always rules apply only to terminated prefixes: an occurrence with an
//    unmet Always-follows (no later partner) or unmet Always-precedes (no
//    earlier partner) counts one violation each. An open suffix could still
//    satisfy them, so unterminated prefixes are exempt.
inline HarmAssessment assess_prefix(const RuleSet& rules, const Variant& prefix) {
    for (const auto& a : prefix.activities)
        if (!rules.contains(a))
            throw std::invalid_argument("activity '" + a +
                                        "' not in rule universe");

    HarmAssessment result;
    const auto& acts = prefix.activities;
    const std::size_t len = acts.size();

    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t j = i + 1; j < len; ++j) {
            // pair (acts[i] before acts[j]); forbidden if either direction
            // carries a Never rule. One violation per ordered pair.
            if (rules.follows(acts[i], acts[j]) == RelationKind::Never ||
                rules.precedes(acts[j], acts[i]) == RelationKind::Never)
                ++result.violation_count;
        }
    }

    if (prefix.terminated) {
        for (std::size_t i = 0; i < len; ++i) {
            for (const auto& b : rules.universe()) {
                if (rules.follows(acts[i], b) == RelationKind::Always) {
                    bool met = false;
                    for (std::size_t j = i + 1; j < len && !met; ++j)
                        if (acts[j] == b) met = true;
                    if (!met) ++result.violation_count;
                }
                if (rules.precedes(acts[i], b) == RelationKind::Always) {
                    bool met = false;
                    for (std::size_t j = 0; j < i && !met; ++j)
                        if (acts[j] == b) met = true;
                    if (!met) ++result.violation_count;
                }
            }
        }
    }
    return result;
}

// Rule matrix as TSV: one table for follows, one for precedes, rows a1,
// columns a2, cells A/S/N.
inline void write_rules_tsv(const RuleSet& rules, std::ostream& out) {
    auto table = [&](const char* title, auto relation) {
        out << title;
        for (const auto& a : rules.universe()) out << '\t' << a;
        out << '\n';
        for (const auto& a1 : rules.universe()) {
            out << a1;
            for (const auto& a2 : rules.universe())
                out << '\t' << relation_code(relation(a1, a2));
            out << '\n';
        }
    };
    table("follows", [&](const Activity& x, const Activity& y) {
        return rules.follows(x, y);
    });
    out << '\n';
    table("precedes", [&](const Activity& x, const Activity& y) {
        return rules.precedes(x, y);
    });
}

// Score function for the exponential mechanism. Binary scores in {0, 1}
// with sensitivity 1; Continuous scores cap - min(violations, cap) with
// sensitivity cap.
struct ScoreFunction {
    enum class Mode { Binary, Continuous };

    Mode mode = Mode::Binary;
    std::uint64_t cap = 3;  // Continuous only

    double sensitivity() const {
        return mode == Mode::Binary ? 1.0 : static_cast<double>(cap);
    }

    double max_score() const { return sensitivity(); }

    double operator()(const RuleSet& rules, const Variant& prefix) const {
        auto assessment = assess_prefix(rules, prefix);
        if (mode == Mode::Binary) return assessment.harmless() ? 1.0 : 0.0;
        std::uint64_t v = std::min(assessment.violation_count, cap);
        return static_cast<double>(cap - v);
    }
};

}  // namespace sacofa
