#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sauav/detection.hpp"

namespace sauav {

struct EmptyInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Delivered/sent totals of one run.
struct RunTotals {
    std::uint64_t received_x = 0;
    std::uint64_t sent_y = 0;
};

/// Packet delivery ratio in percent: the mean of per-run delivery ratios.
inline double compute_pdr(std::span<const RunTotals> runs) {
    if (runs.empty()) throw EmptyInputError("compute_pdr: no runs");
    double acc = 0.0;
    for (const RunTotals& r : runs) {
        if (r.sent_y == 0) throw EmptyInputError("compute_pdr: run with zero sent packets");
        acc += static_cast<double>(r.received_x) / static_cast<double>(r.sent_y);
    }
    return acc / static_cast<double>(runs.size()) * 100.0;
}

/// Detection/false rates in percent. A zero denominator yields an empty
/// optional (not applicable).
struct Rates {
    std::optional<double> dr;
    std::optional<double> fp_rate;
    std::optional<double> fn_rate;
};

inline Rates compute_rates(const ConfusionMatrix& c) {
    Rates r;
    if (c.tp + c.fn > 0) {
        r.dr = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
        r.fn_rate = 100.0 * static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
    }
    if (c.fp + c.tn > 0) {
        r.fp_rate = 100.0 * static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    }
    return r;
}

/// Residual energy in percent: mean over nodes of remaining/initial.
struct NodeEnergy {
    double remaining = 0.0;
    double initial = 0.0;
};

inline double compute_re(std::span<const NodeEnergy> nodes) {
    if (nodes.empty()) throw EmptyInputError("compute_re: no nodes");
    double acc = 0.0;
    for (const NodeEnergy& n : nodes) {
        acc += n.remaining / n.initial;
    }
    return acc / static_cast<double>(nodes.size()) * 100.0;
}

/// Full per-scenario result set.
struct MetricsReport {
    double pdr = 0.0;
    std::optional<double> dr;
    std::optional<double> fp_rate;
    std::optional<double> fn_rate;
    double re = 0.0;
    ConfusionMatrix confusion;
    std::uint64_t sent_total = 0;
    std::uint64_t received_total = 0;
    std::uint32_t runs = 1;
    std::uint64_t comment_requests = 0; // detection overhead proxy
    std::uint64_t listen_violations = 0;
    std::set<NodeId> detected;
    std::set<NodeId> ground_truth_malicious;
};

inline std::string format_optional(const std::optional<double>& v, int precision = 4) {
    if (!v) return "na";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, *v);
    return buf;
}

inline std::string format_double(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

} // namespace sauav
