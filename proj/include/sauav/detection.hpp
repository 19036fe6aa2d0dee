#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "sauav/counters.hpp"
#include "sauav/radio.hpp"
#include "sauav/time.hpp"

namespace sauav {

enum class Rule { R1 = 1, R2, R3, R4, R5, R6 };

enum class SuspicionLevel { Clear, Suspect, Confirmed };

inline const char* suspicion_level_name(SuspicionLevel l) {
    switch (l) {
    case SuspicionLevel::Clear: return "clear";
    case SuspicionLevel::Suspect: return "suspect";
    case SuspicionLevel::Confirmed: return "confirmed";
    }
    return "?";
}

struct Suspicion {
    NodeId subject = 0;
    SuspicionLevel level = SuspicionLevel::Clear;
    std::set<Rule> evidence;
    int votes_for = 0;
    int votes_against = 0;

    bool has(Rule r) const { return evidence.contains(r); }
};

inline std::string rule_tags(const Suspicion& s) {
    std::string out;
    for (Rule r : s.evidence) {
        if (!out.empty()) out.push_back(',');
        out.push_back('R');
        out.push_back(static_cast<char>('0' + static_cast<int>(r)));
    }
    return out.empty() ? "-" : out;
}

struct DetectorConfig {
    SimTime window = SimTime::from_seconds(30);
    std::uint64_t n_min = 10;                 // "many" received packets
    double forward_ratio_threshold = 0.2;     // tau_f
    double vote_quorum = 0.5;
    SimTime earliest_margin = SimTime::from_millis(10);
};

/// Rule evaluation over one window of behavior counters.
///
///   R1  sent own data and relays at a healthy ratio     -> clear
///   R2  took in many transit packets, relayed almost none -> suspect
///   R3  sent at least one route reply                    -> enabling tag
///   R4  R2 and R3 together                               -> confirmed
///   R5  replied ahead of every other replier             -> suspect
///   R6  reply carried max sequence and min hop count     -> suspect
///
/// R4 overrides everything ("surely malicious"); otherwise R1 exonerates.
inline Suspicion evaluate_rules(NodeId subject, const BehaviorCounters& c,
                                const DetectorConfig& cfg) {
    Suspicion s;
    s.subject = subject;

    const double ratio = c.forward_ratio();
    const bool r1 = c.data_sent > 0 && ratio >= cfg.forward_ratio_threshold;
    const bool r2 = c.data_received >= cfg.n_min && ratio < cfg.forward_ratio_threshold;
    const bool r3 = c.rrep_sent >= 1;
    const bool r5 = c.earliest_rrep_flag;
    const bool r6 = c.max_seq_min_hops_flag;

    if (r1) s.evidence.insert(Rule::R1);
    if (r2) s.evidence.insert(Rule::R2);
    if (r3) s.evidence.insert(Rule::R3);
    if (r5) s.evidence.insert(Rule::R5);
    if (r6) s.evidence.insert(Rule::R6);

    if (r2 && r3) {
        s.evidence.insert(Rule::R4);
        s.level = SuspicionLevel::Confirmed;
    } else if (r1) {
        s.level = SuspicionLevel::Clear;
    } else if (r2 || r5 || r6) {
        s.level = SuspicionLevel::Suspect;
    } else {
        s.level = SuspicionLevel::Clear;
    }
    return s;
}

/// Outcome of a neighbor comment round about one suspect.
struct JudgementOutcome {
    bool defer = false; // nobody answered; retry next window
    bool verdict = false;
    std::size_t responders = 0;
    std::size_t agreeing = 0;
    SuspicionLevel merged_level = SuspicionLevel::Clear;
};

/// Merges the initiator's window snapshot with the responders' counters and
/// re-runs the rules; the verdict is "malicious" when the merged evidence
/// confirms, or when it stays suspect and enough responders independently
/// agree.
inline JudgementOutcome decide_judgement(NodeId subject, const BehaviorCounters& own,
                                         const std::vector<BehaviorCounters>& replies,
                                         const DetectorConfig& cfg) {
    JudgementOutcome out;
    out.responders = replies.size();
    if (replies.empty()) {
        out.defer = true;
        return out;
    }
    BehaviorCounters merged = own;
    for (const BehaviorCounters& r : replies) {
        merged.merge(r);
        if (evaluate_rules(subject, r, cfg).level >= SuspicionLevel::Suspect) ++out.agreeing;
    }
    out.merged_level = evaluate_rules(subject, merged, cfg).level;
    const bool quorum_met = static_cast<double>(out.agreeing) >=
                            cfg.vote_quorum * static_cast<double>(out.responders);
    out.verdict = out.merged_level == SuspicionLevel::Confirmed ||
                  (out.merged_level == SuspicionLevel::Suspect && quorum_met);
    return out;
}

struct ConfusionMatrix {
    std::uint32_t tp = 0;
    std::uint32_t fp = 0;
    std::uint32_t fn = 0;
    std::uint32_t tn = 0;

    std::uint32_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Confusion matrix of a finished run: ground truth vs the detected set.
inline ConfusionMatrix classify_all(const std::set<NodeId>& truth_malicious,
                                    const std::set<NodeId>& detected, std::uint32_t total_nodes) {
    ConfusionMatrix m;
    for (NodeId n = 0; n < total_nodes; ++n) {
        const bool mal = truth_malicious.contains(n);
        const bool det = detected.contains(n);
        if (mal && det) {
            ++m.tp;
        } else if (!mal && det) {
            ++m.fp;
        } else if (mal && !det) {
            ++m.fn;
        } else {
            ++m.tn;
        }
    }
    return m;
}

} // namespace sauav
