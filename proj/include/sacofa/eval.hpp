#pragma once

// Utility and recognizable-noise metrics: compares an anonymized variant
// distribution against the original log.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "sacofa/event_log.hpp"
#include "sacofa/rules.hpp"

namespace sacofa {

struct UtilityReport {
    double variant_recall = 0.0;
    double variant_precision = 0.0;
    double l1_distance = 0.0;      // over count-normalized distributions
    double normal_fraction = 0.0;  // count-weighted share with zero violations
    std::uint64_t total_count_original = 0;
    std::uint64_t total_count_anonymized = 0;
    std::vector<std::string> warnings;
};

inline UtilityReport compare(const EventLog& original,
                             const VariantDistribution& anonymized) {
    UtilityReport report;
    VariantDistribution truth = variant_query(original);
    RuleSet rules = derive_rules(original);

    report.total_count_original = truth.total();
    report.total_count_anonymized = anonymized.total();

    std::size_t shared = 0;
    for (const auto& [v, c] : anonymized.entries())
        if (truth.count(v) > 0) ++shared;

    report.variant_recall =
        truth.empty() ? 0.0
                      : static_cast<double>(shared) /
                            static_cast<double>(truth.size());
    if (anonymized.empty()) {
        report.variant_precision = 0.0;
        report.warnings.push_back(
            "anonymized distribution is empty; precision undefined, reported as 0");
    } else {
        report.variant_precision = static_cast<double>(shared) /
                                   static_cast<double>(anonymized.size());
    }

    std::set<Variant> support;
    for (const auto& [v, c] : truth.entries()) support.insert(v);
    for (const auto& [v, c] : anonymized.entries()) support.insert(v);
    const double orig_total = static_cast<double>(report.total_count_original);
    const double anon_total = static_cast<double>(report.total_count_anonymized);
    double l1 = 0.0;
    for (const auto& v : support) {
        double p = orig_total > 0 ? truth.count(v) / orig_total : 0.0;
        double q = anon_total > 0 ? anonymized.count(v) / anon_total : 0.0;
        l1 += std::abs(p - q);
    }
    report.l1_distance = l1;

    std::uint64_t normal = 0;
    for (const auto& [v, c] : anonymized.entries())
        if (assess_prefix(rules, v).harmless()) normal += c;
    report.normal_fraction =
        anon_total > 0 ? static_cast<double>(normal) / anon_total : 0.0;
    return report;
}

}  // namespace sacofa
