#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "sauav/auth.hpp"
#include "sauav/counters.hpp"
#include "sauav/keyed_hash.hpp"
#include "sauav/radio.hpp"

namespace sauav {

/// Neighbor discovery beacon. Carries the sender's security association so
/// receivers can authenticate before admitting the sender to their matrix.
struct Hello {
    NodeId src = 0;
    crypto::AuthMessage auth;
};

struct Rreq {
    NodeId src = 0; // route requester (flood originator)
    NodeId dst = 0;
    std::uint32_t request_id = 0;
    std::uint32_t seq_no = 0; // destination sequence number known to the requester
    std::uint16_t hop_count = 0;
};

struct Rrep {
    NodeId src = 0; // replier
    NodeId dst = 0; // requester the reply travels back to
    std::uint32_t seq_no = 0;
    std::uint16_t hop_count = 0;  // hops from the current holder to the route target
    std::uint32_t request_id = 0; // correlates replies with one discovery round
    NodeId route_target = 0;      // destination the reply answers for
};

struct Data {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint16_t payload_bytes = 512;
    std::uint32_t flow_id = 0;
    std::uint32_t packet_id = 0;
    std::vector<NodeId> route; // hops traversed so far, starting at src
};

/// Mobile-agent carrier. Wire layout (see agent_codec.hpp) is, in order:
/// source id, destination id, code 3, hash output, data code, data. The data
/// section (valid bit || agent bit) travels masked by the data code; the data
/// code field itself is zeroed in flight and only released after mutual trust.
struct AgentPacket {
    NodeId src_uav = 0;
    NodeId dst_uav = 0;
    std::vector<std::uint8_t> code3;
    std::vector<std::uint8_t> hash_output;
    std::uint8_t data_code = 0;
    std::uint8_t data = 0; // masked (valid bit << 1 | agent bit)
};

struct ConfidenceEntry {
    NodeId node = 0;
    bool valid = false;
    bool agent = false;
};

/// Agent-node broadcast distributing established valid/agent bits.
struct Confidence {
    NodeId src = 0;
    std::vector<ConfidenceEntry> trusted;
};

struct CommentRequest {
    NodeId src = 0;
    NodeId subject = 0;
    std::uint32_t round_id = 0;
};

struct CommentReply {
    NodeId src = 0;
    NodeId subject = 0;
    std::uint32_t round_id = 0;
    BehaviorCounters counters;
};

/// Quarantine broadcast, flooded network-wide.
struct Warning {
    NodeId src = 0;
    NodeId subject = 0;
};

struct Death {
    NodeId src = 0;
};

enum class ControlKind : std::uint8_t { RediscoverNeighbors };

struct Control {
    NodeId src = 0;
    ControlKind kind = ControlKind::RediscoverNeighbors;
};

using Packet = std::variant<Hello, Rreq, Rrep, Data, AgentPacket, Confidence, CommentRequest,
                            CommentReply, Warning, Death, Control>;

namespace detail {
template <typename T>
concept HasSrc = requires(const T& t) { t.src; };
} // namespace detail

inline NodeId packet_source(const Packet& p) {
    return std::visit(
        [](const auto& m) -> NodeId {
            if constexpr (detail::HasSrc<std::decay_t<decltype(m)>>) {
                return m.src;
            } else {
                return m.src_uav;
            }
        },
        p);
}

inline const char* packet_type_name(const Packet& p) {
    struct Namer {
        const char* operator()(const Hello&) { return "HELLO"; }
        const char* operator()(const Rreq&) { return "RREQ"; }
        const char* operator()(const Rrep&) { return "RREP"; }
        const char* operator()(const Data&) { return "DATA"; }
        const char* operator()(const AgentPacket&) { return "AGENT"; }
        const char* operator()(const Confidence&) { return "CONFIDENCE"; }
        const char* operator()(const CommentRequest&) { return "COMMENT_REQ"; }
        const char* operator()(const CommentReply&) { return "COMMENT_REP"; }
        const char* operator()(const Warning&) { return "WARNING"; }
        const char* operator()(const Death&) { return "DEATH"; }
        const char* operator()(const Control&) { return "CONTROL"; }
    };
    return std::visit(Namer{}, p);
}

/// Nominal on-air size in bytes, used for energy accounting. Layouts are
/// documented in PROTOCOL.md.
inline std::size_t wire_size_bytes(const Packet& p) {
    struct Sizer {
        std::size_t operator()(const Hello&) { return 4 + 8 + 8 + 8; }
        std::size_t operator()(const Rreq&) { return 4 + 4 + 4 + 4 + 2; }
        std::size_t operator()(const Rrep&) { return 4 + 4 + 4 + 2 + 4 + 4; }
        std::size_t operator()(const Data& d) { return 4 + 4 + 2 + 4 + 4 + d.payload_bytes; }
        std::size_t operator()(const AgentPacket& a) {
            return 4 + 4 + a.code3.size() + a.hash_output.size() + 1 + 1;
        }
        std::size_t operator()(const Confidence& c) { return 4 + 2 + 6 * c.trusted.size(); }
        std::size_t operator()(const CommentRequest&) { return 4 + 4 + 4; }
        std::size_t operator()(const CommentReply&) { return 4 + 4 + 4 + 40; }
        std::size_t operator()(const Warning&) { return 4 + 4; }
        std::size_t operator()(const Death&) { return 4; }
        std::size_t operator()(const Control&) { return 4 + 1; }
    };
    return std::visit(Sizer{}, p);
}

} // namespace sauav
