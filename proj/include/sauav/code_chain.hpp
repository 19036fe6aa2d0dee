#pragma once

#include <cstdint>
#include <stdexcept>

#include "sauav/keyed_hash.hpp"

namespace sauav::crypto {

struct WidthMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Codes provisioned into every legitimate node before deployment: code 1 in
/// the clear, code 2 = H_agent(code 1), and the node-side hash used to answer
/// agents with code 3 = H_node(code 2).
struct NodeProvisioning {
    CodeWord code1{};
    CodeWord code2{};
    KeyedHash node_hash;
};

/// Secrets carried by a genuine agent: the agent hash, the expected
/// code 3 = H_node(H_agent(code 1)), and the data-code mask.
struct AgentProvisioning {
    KeyedHash agent_hash;
    CodeWord code3_expected{};
    std::uint8_t data_code = 0;
    int data_bits = 2;
};

inline CodeWord derive_code2(const KeyedHash& agent_hash, const CodeWord& code1) {
    return agent_hash(code1);
}

inline CodeWord derive_code3(const KeyedHash& node_hash, const CodeWord& code2) {
    return node_hash(code2);
}

struct ChainMaterial {
    NodeProvisioning node;
    AgentProvisioning agent;
};

/// Builds a consistent node/agent provisioning pair from two independent hash
/// keys and a fresh code 1.
inline ChainMaterial provision_chain(const CodeWord& agent_key, const CodeWord& node_key,
                                     const CodeWord& code1, std::uint8_t data_code,
                                     int data_bits = 2) {
    ChainMaterial m;
    m.agent.agent_hash = KeyedHash(agent_key);
    m.node.node_hash = KeyedHash(node_key);
    m.node.code1 = code1;
    m.node.code2 = derive_code2(m.agent.agent_hash, code1);
    m.agent.code3_expected = derive_code3(m.node.node_hash, m.node.code2);
    m.agent.data_bits = data_bits;
    m.agent.data_code = static_cast<std::uint8_t>(data_code & ((1u << data_bits) - 1u));
    return m;
}

inline void check_width(int width_bits) {
    if (width_bits < 1 || width_bits > 8) {
        throw WidthMismatchError("data width must be 1..8 bits");
    }
}

/// XOR-masks the data section with the data code. Both operands must fit the
/// declared width.
inline std::uint8_t mask_data(std::uint8_t data_code, std::uint8_t data_bits, int width_bits) {
    check_width(width_bits);
    const std::uint8_t mask = static_cast<std::uint8_t>((1u << width_bits) - 1u);
    if ((data_code & ~mask) != 0 || (data_bits & ~mask) != 0) {
        throw WidthMismatchError("value wider than declared data width");
    }
    return static_cast<std::uint8_t>(data_code ^ data_bits);
}

inline std::uint8_t unmask_data(std::uint8_t data_code, std::uint8_t masked, int width_bits) {
    return mask_data(data_code, masked, width_bits);
}

} // namespace sauav::crypto
