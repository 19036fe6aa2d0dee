#pragma once

#include <algorithm>
#include <cstdint>

namespace sauav {

/// Per-subject activity record: what a node has done (self view) or what a
/// neighbor has been observed doing (watchdog view). All counts are monotone
/// within a detection window.
struct BehaviorCounters {
    std::uint64_t data_sent = 0;      // packets originated
    std::uint64_t data_received = 0;  // transit packets taken in
    std::uint64_t data_forwarded = 0; // transit packets passed on
    std::uint64_t rrep_sent = 0;
    bool earliest_rrep_flag = false;     // replied ahead of all others by the margin
    bool max_seq_min_hops_flag = false;  // reply carried max seq and min hops of its round
    std::uint32_t last_rrep_seq = 0;
    std::uint16_t last_rrep_hops = 0;

    BehaviorCounters& merge(const BehaviorCounters& o) {
        data_sent += o.data_sent;
        data_received += o.data_received;
        data_forwarded += o.data_forwarded;
        rrep_sent += o.rrep_sent;
        earliest_rrep_flag = earliest_rrep_flag || o.earliest_rrep_flag;
        max_seq_min_hops_flag = max_seq_min_hops_flag || o.max_seq_min_hops_flag;
        last_rrep_seq = std::max(last_rrep_seq, o.last_rrep_seq);
        last_rrep_hops = std::max(last_rrep_hops, o.last_rrep_hops);
        return *this;
    }

    /// Fraction of taken-in transit packets that went back out. A node that
    /// relayed nothing because it received nothing scores a clean 1.
    double forward_ratio() const {
        if (data_received == 0) return 1.0;
        return static_cast<double>(data_forwarded) / static_cast<double>(data_received);
    }

    bool operator==(const BehaviorCounters&) const = default;
};

} // namespace sauav
