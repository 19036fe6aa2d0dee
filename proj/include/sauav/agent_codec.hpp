#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sauav/code_chain.hpp"
#include "sauav/packet.hpp"

namespace sauav {

/// Wire parameters for the agent packet. Code words default to 32 bytes; the
/// data section and data code are small bit fields carried in one byte each.
struct CodecConfig {
    std::size_t code_word_bytes = crypto::kCodeWordBytes;
    int data_bits = 2;
};

namespace detail {
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
           (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}
} // namespace detail

/// Transport-integrity digest over the other wire fields. It has no protocol
/// role beyond detecting corruption in flight.
inline std::vector<std::uint8_t> agent_packet_digest(const AgentPacket& p,
                                                     const CodecConfig& cfg) {
    std::vector<std::uint8_t> buf;
    detail::put_u32(buf, p.src_uav);
    detail::put_u32(buf, p.dst_uav);
    buf.insert(buf.end(), p.code3.begin(), p.code3.end());
    buf.push_back(p.data_code);
    buf.push_back(p.data);
    const crypto::CodeWord d = crypto::sha3_256(buf);
    return std::vector<std::uint8_t>(d.begin(), d.begin() + cfg.code_word_bytes);
}

inline std::size_t agent_packet_wire_size(const CodecConfig& cfg) {
    return 4 + 4 + cfg.code_word_bytes + cfg.code_word_bytes + 1 + 1;
}

/// Serializes in exact field order: source, destination, code 3, hash
/// output, data code, data.
inline std::vector<std::uint8_t> encode_agent_packet(const AgentPacket& p,
                                                     const CodecConfig& cfg) {
    if (p.code3.size() != cfg.code_word_bytes || p.hash_output.size() != cfg.code_word_bytes) {
        throw crypto::WidthMismatchError("code word width does not match codec config");
    }
    const std::uint8_t width_mask = static_cast<std::uint8_t>((1u << cfg.data_bits) - 1u);
    if ((p.data_code & ~width_mask) != 0 || (p.data & ~width_mask) != 0) {
        throw crypto::WidthMismatchError("data section wider than configured");
    }
    std::vector<std::uint8_t> out;
    out.reserve(agent_packet_wire_size(cfg));
    detail::put_u32(out, p.src_uav);
    detail::put_u32(out, p.dst_uav);
    out.insert(out.end(), p.code3.begin(), p.code3.end());
    out.insert(out.end(), p.hash_output.begin(), p.hash_output.end());
    out.push_back(p.data_code);
    out.push_back(p.data);
    return out;
}

inline AgentPacket decode_agent_packet(std::span<const std::uint8_t> wire,
                                       const CodecConfig& cfg) {
    if (wire.size() != agent_packet_wire_size(cfg)) {
        throw crypto::WidthMismatchError("agent packet wire size mismatch");
    }
    AgentPacket p;
    std::size_t at = 0;
    p.src_uav = detail::get_u32(wire, at);
    at += 4;
    p.dst_uav = detail::get_u32(wire, at);
    at += 4;
    p.code3.assign(wire.begin() + at, wire.begin() + at + cfg.code_word_bytes);
    at += cfg.code_word_bytes;
    p.hash_output.assign(wire.begin() + at, wire.begin() + at + cfg.code_word_bytes);
    at += cfg.code_word_bytes;
    p.data_code = wire[at++];
    p.data = wire[at++];
    return p;
}

} // namespace sauav
