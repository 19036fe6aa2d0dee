#pragma once

#include <map>
#include <vector>

#include "sauav/packet.hpp"
#include "sauav/time.hpp"

namespace sauav {

/// One-hop neighbor record. Valid and agent bits start false after HELLO
/// discovery; only the agent machinery (a successful handshake or a heeded
/// Confidence packet) raises them.
struct NeighborEntry {
    bool valid = false;
    bool agent = false;
    double last_rss = 0.0;
    SimTime last_seen{};
};

class NeighborMatrix {
public:
    /// Admits (or refreshes) a HELLO sender. Trust bits of an existing entry
    /// are preserved; a new entry starts with both bits false.
    void process_hello(NodeId src, SimTime now) {
        auto [it, inserted] = entries_.try_emplace(src);
        it->second.last_seen = now;
    }

    /// Applies the tuples of a Confidence packet from an already-trusted
    /// source. Unknown nodes and the receiver itself are skipped. The caller
    /// is responsible for the src-is-valid precondition.
    void apply_confidence(NodeId self, const Confidence& c) {
        for (const ConfidenceEntry& e : c.trusted) {
            if (e.node == self) continue;
            auto it = entries_.find(e.node);
            if (it == entries_.end()) continue;
            it->second.valid = e.valid;
            it->second.agent = e.agent;
        }
    }

    /// Signal-strength eviction on agent return. Returns true when the entry
    /// was removed (rss below threshold).
    bool evict_weak(NodeId n, double rss, double threshold) {
        auto it = entries_.find(n);
        if (it == entries_.end()) return false;
        it->second.last_rss = rss;
        if (rss < threshold) {
            entries_.erase(it);
            return true;
        }
        return false;
    }

    void expire_older_than(SimTime cutoff) {
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (it->second.last_seen < cutoff) {
                it = entries_.erase(it);
            } else {
                ++it;
            }
        }
    }

    void set_trust(NodeId n, bool valid, bool agent, SimTime now) {
        auto [it, inserted] = entries_.try_emplace(n);
        if (inserted) it->second.last_seen = now;
        it->second.valid = valid;
        it->second.agent = agent;
    }

    void mark_invalid(NodeId n) {
        auto it = entries_.find(n);
        if (it != entries_.end()) {
            it->second.valid = false;
            it->second.agent = false;
        }
    }

    void erase(NodeId n) { entries_.erase(n); }
    bool contains(NodeId n) const { return entries_.contains(n); }

    bool is_valid(NodeId n) const {
        auto it = entries_.find(n);
        return it != entries_.end() && it->second.valid;
    }

    bool is_agent(NodeId n) const {
        auto it = entries_.find(n);
        return it != entries_.end() && it->second.agent;
    }

    const NeighborEntry* find(NodeId n) const {
        auto it = entries_.find(n);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::vector<NodeId> ids() const {
        std::vector<NodeId> out;
        out.reserve(entries_.size());
        for (const auto& [id, e] : entries_) out.push_back(id);
        return out;
    }

    std::vector<NodeId> valid_ids() const {
        std::vector<NodeId> out;
        for (const auto& [id, e] : entries_) {
            if (e.valid) out.push_back(id);
        }
        return out;
    }

    std::size_t size() const { return entries_.size(); }
    const std::map<NodeId, NeighborEntry>& entries() const { return entries_; }

private:
    std::map<NodeId, NeighborEntry> entries_; // ordered: deterministic iteration
};

} // namespace sauav
