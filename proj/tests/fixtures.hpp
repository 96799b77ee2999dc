#pragma once

// Shared test fixtures: the six-variant emergency-room log and a synthetic
// semi-structured log generated from a known acyclic skeleton.

#include <cstdint>
#include <string>
#include <vector>

#include "sacofa/dp_mech.hpp"
#include "sacofa/event_log.hpp"

namespace fixtures {

// 49 cases over 6 activities:
//   <Register, Triage, Surg., Release>                20
//   <Register, Triage, Surg., Antibio., Release>      12
//   <Register, Triage, Antibio., Antibio., Release>    6
//   <Register, Triage, Antibio., Surg., Release>       5
//   <Register, Triage, Consul., Release>               2
//   <Register, Triage, Consul., Surg., Release>        4
inline sacofa::EventLog er_log() {
    using V = std::vector<std::string>;
    const std::vector<std::pair<V, int>> variants = {
        {{"Register", "Triage", "Surg.", "Release"}, 20},
        {{"Register", "Triage", "Surg.", "Antibio.", "Release"}, 12},
        {{"Register", "Triage", "Antibio.", "Antibio.", "Release"}, 6},
        {{"Register", "Triage", "Antibio.", "Surg.", "Release"}, 5},
        {{"Register", "Triage", "Consul.", "Release"}, 2},
        {{"Register", "Triage", "Consul.", "Surg.", "Release"}, 4},
    };
    sacofa::EventLog log;
    int case_no = 0;
    for (const auto& [acts, count] : variants) {
        for (int i = 0; i < count; ++i) {
            sacofa::Trace t;
            t.case_id = "c" + std::to_string(++case_no);
            t.activities = acts;
            log.traces.push_back(t);
        }
    }
    log.activity_universe = {"Antibio.", "Consul.", "Register",
                             "Release",  "Surg.",   "Triage"};
    return log;
}

inline sacofa::EventLog log_from_variants(
    const std::vector<std::pair<std::vector<std::string>, int>>& variants) {
    sacofa::EventLog log;
    int case_no = 0;
    std::vector<std::string> universe;
    for (const auto& [acts, count] : variants) {
        for (const auto& a : acts) universe.push_back(a);
        for (int i = 0; i < count; ++i) {
            sacofa::Trace t;
            t.case_id = "c" + std::to_string(++case_no);
            t.activities = acts;
            log.traces.push_back(t);
        }
    }
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()),
                   universe.end());
    log.activity_universe = universe;
    return log;
}

// Semi-structured synthetic log: 12 activities drawn from an acyclic
// skeleton with an exclusive choice, an optional step, a repeatable step,
// and an optional tail. Deterministic for a fixed seed.
//
//   Start -> (PathA | PathB) -> [Check]* -> Work -> [Extra] ->
//   (ShipX | ShipY) -> [Survey] -> Bill -> Close
inline sacofa::EventLog synthetic_log(std::uint64_t seed, int num_traces) {
    sacofa::RandomSource rng(seed);
    std::vector<std::pair<std::vector<std::string>, int>> traces;
    sacofa::EventLog log;
    std::vector<std::string> universe = {"Bill",  "Check", "Close", "Extra",
                                         "PathA", "PathB", "ShipX", "ShipY",
                                         "Start", "Survey", "Work", "Review"};
    for (int i = 0; i < num_traces; ++i) {
        sacofa::Trace t;
        t.case_id = "s" + std::to_string(i);
        auto& acts = t.activities;
        acts.push_back("Start");
        acts.push_back(rng.uniform() < 0.6 ? "PathA" : "PathB");
        int checks = 0;
        while (rng.uniform() < 0.45 && checks < 3) {
            acts.push_back("Check");
            ++checks;
        }
        acts.push_back("Work");
        if (rng.uniform() < 0.3) acts.push_back("Extra");
        if (rng.uniform() < 0.25) acts.push_back("Review");
        acts.push_back(rng.uniform() < 0.5 ? "ShipX" : "ShipY");
        if (rng.uniform() < 0.35) acts.push_back("Survey");
        acts.push_back("Bill");
        acts.push_back("Close");
        log.traces.push_back(std::move(t));
    }
    std::sort(universe.begin(), universe.end());
    log.activity_universe = universe;
    return log;
}

}  // namespace fixtures
