#include <catch2/catch_amalgamated.hpp>

#include "sauav/agent_codec.hpp"
#include "sauav/neighbor_matrix.hpp"
#include "sauav/packet.hpp"
#include "sauav/rng.hpp"

using namespace sauav;

namespace {

AgentPacket random_agent_packet(Rng& rng, const CodecConfig& cfg) {
    AgentPacket p;
    p.src_uav = static_cast<NodeId>(rng.below(1u << 20));
    p.dst_uav = static_cast<NodeId>(rng.below(1u << 20));
    p.code3.resize(cfg.code_word_bytes);
    p.hash_output.resize(cfg.code_word_bytes);
    for (auto& b : p.code3) b = static_cast<std::uint8_t>(rng.below(256));
    for (auto& b : p.hash_output) b = static_cast<std::uint8_t>(rng.below(256));
    p.data_code = static_cast<std::uint8_t>(rng.below(1u << cfg.data_bits));
    p.data = static_cast<std::uint8_t>(rng.below(1u << cfg.data_bits));
    return p;
}

bool same_packet(const AgentPacket& a, const AgentPacket& b) {
    return a.src_uav == b.src_uav && a.dst_uav == b.dst_uav && a.code3 == b.code3 &&
           a.hash_output == b.hash_output && a.data_code == b.data_code && a.data == b.data;
}

} // namespace

TEST_CASE("agent packet wire layout starts with source then destination") {
    CodecConfig cfg;
    Rng rng(1);
    AgentPacket p = random_agent_packet(rng, cfg);
    p.src_uav = 7;
    p.dst_uav = 9;
    const auto wire = encode_agent_packet(p, cfg);
    REQUIRE(wire.size() == agent_packet_wire_size(cfg));
    REQUIRE(wire[0] == 0);
    REQUIRE(wire[3] == 7); // big-endian source id
    REQUIRE(wire[7] == 9); // big-endian destination id
    // field order: code 3 follows the ids, then hash output, data code, data
    REQUIRE(std::equal(p.code3.begin(), p.code3.end(), wire.begin() + 8));
    REQUIRE(std::equal(p.hash_output.begin(), p.hash_output.end(),
                       wire.begin() + 8 + cfg.code_word_bytes));
    REQUIRE(wire[wire.size() - 2] == p.data_code);
    REQUIRE(wire[wire.size() - 1] == p.data);
}

TEST_CASE("codec round-trips 1000 random packets") {
    CodecConfig cfg;
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const AgentPacket p = random_agent_packet(rng, cfg);
        const auto wire = encode_agent_packet(p, cfg);
        const AgentPacket back = decode_agent_packet(wire, cfg);
        REQUIRE(same_packet(p, back));
    }
}

TEST_CASE("codec honors configured widths") {
    CodecConfig narrow;
    narrow.code_word_bytes = 8;
    narrow.data_bits = 1;
    Rng rng(3);
    const AgentPacket p = random_agent_packet(rng, narrow);
    const auto wire = encode_agent_packet(p, narrow);
    REQUIRE(wire.size() == 4 + 4 + 8 + 8 + 1 + 1);
    REQUIRE(same_packet(p, decode_agent_packet(wire, narrow)));

    CodecConfig wide; // default 32-byte words
    AgentPacket bad = random_agent_packet(rng, narrow);
    REQUIRE_THROWS_AS(encode_agent_packet(bad, wide), crypto::WidthMismatchError);

    AgentPacket oversized = random_agent_packet(rng, wide);
    oversized.data = 0x7; // three bits into a two-bit section
    REQUIRE_THROWS_AS(encode_agent_packet(oversized, wide), crypto::WidthMismatchError);

    std::vector<std::uint8_t> short_wire(10, 0);
    REQUIRE_THROWS_AS(decode_agent_packet(short_wire, wide), crypto::WidthMismatchError);
}

TEST_CASE("integrity digest detects corruption") {
    CodecConfig cfg;
    Rng rng(9);
    AgentPacket p = random_agent_packet(rng, cfg);
    p.hash_output = agent_packet_digest(p, cfg);
    auto wire = encode_agent_packet(p, cfg);
    AgentPacket ok = decode_agent_packet(wire, cfg);
    REQUIRE(agent_packet_digest(ok, cfg) == ok.hash_output);
    wire[9] ^= 0xFF; // flip a code 3 byte
    AgentPacket corrupt = decode_agent_packet(wire, cfg);
    REQUIRE(agent_packet_digest(corrupt, cfg) != corrupt.hash_output);
}

TEST_CASE("hello discovery fills the matrix with cleared bits") {
    NeighborMatrix m;
    for (NodeId n : {2u, 3u, 4u, 5u}) m.process_hello(n, SimTime::from_seconds(1.0));
    REQUIRE(m.size() == 4);
    for (NodeId n : {2u, 3u, 4u, 5u}) {
        const NeighborEntry* e = m.find(n);
        REQUIRE(e != nullptr);
        REQUIRE_FALSE(e->valid);
        REQUIRE_FALSE(e->agent);
    }
}

TEST_CASE("duplicate hello refreshes last_seen without duplicating the entry") {
    NeighborMatrix m;
    m.process_hello(2, SimTime::from_seconds(1.0));
    m.set_trust(2, true, false, SimTime::from_seconds(1.0));
    m.process_hello(2, SimTime::from_seconds(5.0));
    REQUIRE(m.size() == 1);
    REQUIRE(m.find(2)->last_seen == SimTime::from_seconds(5.0));
    REQUIRE(m.find(2)->valid); // refresh does not reset trust
}

TEST_CASE("confidence updates only known neighbors and skips self") {
    // B's matrix after agent visits: A and H trusted agents, C and F unknown.
    NeighborMatrix b;
    const NodeId A = 0, B = 1, C = 2, F = 5, H = 7, X = 40;
    for (NodeId n : {A, C, F, H}) b.process_hello(n, SimTime{});
    b.set_trust(A, true, true, SimTime{});
    b.set_trust(H, true, true, SimTime{});

    Confidence conf;
    conf.src = A;
    conf.trusted = {{A, true, true}, {H, true, true}, {C, true, false}, {F, true, false},
                    {B, true, false}, {X, true, false}};
    b.apply_confidence(B, conf);

    REQUIRE(b.is_valid(C));
    REQUIRE_FALSE(b.is_agent(C));
    REQUIRE(b.is_valid(F));
    REQUIRE(b.is_valid(A));
    REQUIRE(b.is_agent(A));
    REQUIRE(b.is_valid(H));
    REQUIRE_FALSE(b.contains(X)); // unknown node ignored
    REQUIRE_FALSE(b.contains(B)); // self skipped
}

TEST_CASE("weak-signal eviction at the threshold boundary") {
    NeighborMatrix m;
    m.process_hello(3, SimTime{});
    REQUIRE_FALSE(m.evict_weak(3, 0.0, 0.0)); // rss == threshold stays
    REQUIRE(m.contains(3));
    REQUIRE(m.evict_weak(3, -0.001, 0.0)); // just below: evicted
    REQUIRE_FALSE(m.contains(3));
    REQUIRE_FALSE(m.evict_weak(99, -5.0, 0.0)); // absent: no-op
}

TEST_CASE("stale entries expire") {
    NeighborMatrix m;
    m.process_hello(1, SimTime::from_seconds(0.0));
    m.process_hello(2, SimTime::from_seconds(2.9));
    m.expire_older_than(SimTime::from_seconds(1.0));
    REQUIRE_FALSE(m.contains(1));
    REQUIRE(m.contains(2));
}

TEST_CASE("behavior counters merge by summing and flag-or") {
    BehaviorCounters a;
    a.data_received = 10;
    a.data_forwarded = 1;
    a.rrep_sent = 1;
    BehaviorCounters b;
    b.data_received = 5;
    b.earliest_rrep_flag = true;
    b.last_rrep_seq = 77;
    a.merge(b);
    REQUIRE(a.data_received == 15);
    REQUIRE(a.data_forwarded == 1);
    REQUIRE(a.rrep_sent == 1);
    REQUIRE(a.earliest_rrep_flag);
    REQUIRE(a.last_rrep_seq == 77);
}

TEST_CASE("forward ratio of an idle node is clean") {
    BehaviorCounters c;
    REQUIRE(c.forward_ratio() == 1.0);
    c.data_received = 4;
    c.data_forwarded = 1;
    REQUIRE(c.forward_ratio() == Catch::Approx(0.25));
}

TEST_CASE("packet source extraction and wire sizes") {
    Packet p = Data{3, 9, 512, 0, 0, {3}};
    REQUIRE(packet_source(p) == 3);
    REQUIRE(wire_size_bytes(p) == 4 + 4 + 2 + 4 + 4 + 512);
    Packet w = Warning{5, 8};
    REQUIRE(packet_source(w) == 5);
    Packet ap = AgentPacket{11, 12, std::vector<std::uint8_t>(32), std::vector<std::uint8_t>(32),
                            0, 0};
    REQUIRE(packet_source(ap) == 11);
    REQUIRE(wire_size_bytes(ap) == 4 + 4 + 32 + 32 + 1 + 1);
}
