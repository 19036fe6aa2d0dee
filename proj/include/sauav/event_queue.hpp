#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sauav/time.hpp"

namespace sauav {

/// Event categories driving the simulation loop.
enum class EventKind {
    PacketDelivery,
    AgentCycleTimer,
    MobilityTick,
    TrafficTick,
    MigrationTimeout,
    EnergyCheck,
    SimEnd,
};

inline const char* event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::PacketDelivery: return "PacketDelivery";
    case EventKind::AgentCycleTimer: return "AgentCycleTimer";
    case EventKind::MobilityTick: return "MobilityTick";
    case EventKind::TrafficTick: return "TrafficTick";
    case EventKind::MigrationTimeout: return "MigrationTimeout";
    case EventKind::EnergyCheck: return "EnergyCheck";
    case EventKind::SimEnd: return "SimEnd";
    }
    return "?";
}

struct PastEventError : std::logic_error {
    using std::logic_error::logic_error;
};

template <typename Payload>
struct SimEvent {
    SimTime time;
    std::uint64_t seq = 0; // tiebreak: insertion order among equal timestamps
    EventKind kind{};
    Payload payload;
};

/// Time-ordered event queue with a stable FIFO tiebreak on equal timestamps.
/// Popping an event advances the virtual clock; scheduling into the past is a
/// logic error.
template <typename Payload>
class EventQueue {
public:
    void schedule(SimTime t, EventKind kind, Payload payload) {
        if (t < clock_) {
            throw PastEventError("event scheduled at " + t.str() + " before clock " +
                                 clock_.str());
        }
        heap_.push(Entry{SimEvent<Payload>{t, next_seq_++, kind, std::move(payload)}});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    SimTime now() const { return clock_; }
    SimTime next_time() const { return heap_.top().ev.time; }

    SimEvent<Payload> pop() {
        Entry e = heap_.top();
        heap_.pop();
        clock_ = e.ev.time;
        return std::move(e.ev);
    }

private:
    struct Entry {
        SimEvent<Payload> ev;
        bool operator>(const Entry& o) const {
            if (ev.time != o.ev.time) return ev.time > o.ev.time;
            return ev.seq > o.ev.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
    SimTime clock_{};
    std::uint64_t next_seq_ = 0;
};

} // namespace sauav
