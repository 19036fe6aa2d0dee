#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "sauav/agent_codec.hpp"
#include "sauav/packet.hpp"
#include "sauav/rng.hpp"

namespace sauav {

enum class AttackKind : std::uint8_t { Blackhole, Grayhole, Sinkhole };

inline const char* attack_kind_name(AttackKind k) {
    switch (k) {
    case AttackKind::Blackhole: return "blackhole";
    case AttackKind::Grayhole: return "grayhole";
    case AttackKind::Sinkhole: return "sinkhole";
    }
    return "?";
}

/// Configured behavior of one malicious node. The kind is fixed for the whole
/// run and doubles as detection ground truth.
struct AdversaryProfile {
    AttackKind kind = AttackKind::Blackhole;
    double drop_ratio = 0.5; // grayhole only, must be in (0,1)
    bool captures_agents = false;
    bool injects_fake_agents = false;
    double fake_agent_rate_pps = 0.2; // when injection is on
    bool false_confidence = false;    // agent-hosting attacker spreads bogus trust

    void validate() const {
        if (kind == AttackKind::Grayhole && (drop_ratio <= 0.0 || drop_ratio >= 1.0)) {
            throw std::invalid_argument("grayhole drop_ratio must be strictly inside (0,1), got " +
                                        std::to_string(drop_ratio));
        }
    }
};

/// Grayhole per-packet decision, drawn from the node's own RNG stream.
inline bool grayhole_drops(const AdversaryProfile& p, Rng& rng) {
    return rng.bernoulli(p.drop_ratio);
}

/// Sinkhole answer to any route request: maximal sequence number, hop count 1,
/// no processing delay.
inline Rrep sinkhole_reply(const Rreq& rreq, NodeId self) {
    Rrep r;
    r.src = self;
    r.dst = rreq.src;
    r.seq_no = std::numeric_limits<std::uint32_t>::max();
    r.hop_count = 1;
    r.request_id = rreq.request_id;
    r.route_target = rreq.dst;
    return r;
}

/// Blackhole route lure: outbids the requested sequence number without the
/// sinkhole's saturated signature.
inline Rrep blackhole_reply(const Rreq& rreq, NodeId self) {
    Rrep r;
    r.src = self;
    r.dst = rreq.src;
    r.seq_no = rreq.seq_no + 100;
    r.hop_count = 1;
    r.request_id = rreq.request_id;
    r.route_target = rreq.dst;
    return r;
}

/// Fabricated agent packet: random code fields, no agent hash behind them, so
/// handshake step 2 fails at any provisioned host.
inline AgentPacket make_fake_agent_packet(NodeId self, NodeId target, const CodecConfig& cfg,
                                          Rng& rng) {
    AgentPacket p;
    p.src_uav = self;
    p.dst_uav = target;
    const crypto::CodeWord c3 = crypto::random_code_word(rng);
    p.code3.assign(c3.begin(), c3.begin() + cfg.code_word_bytes);
    p.hash_output = agent_packet_digest(p, cfg);
    p.data_code = 0;
    p.data = static_cast<std::uint8_t>(rng.below(1u << cfg.data_bits));
    return p;
}

} // namespace sauav
