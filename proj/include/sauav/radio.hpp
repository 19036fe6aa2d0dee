#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sauav/mobility.hpp"
#include "sauav/time.hpp"

namespace sauav {

using NodeId = std::uint32_t;

/// Unit-disk radio: a transmission reaches exactly the nodes within range.
/// Energy costs are affine in the payload size.
struct RadioModel {
    double range_m = 250.0;
    SimTime per_hop_delay = SimTime::from_millis(2);
    double tx_fixed_j = 0.2e-3;
    double tx_per_byte_j = 1e-6;
    double rx_fixed_j = 0.1e-3;
    double rx_per_byte_j = 0.5e-6;

    double tx_cost(std::size_t bytes) const {
        return tx_fixed_j + tx_per_byte_j * static_cast<double>(bytes);
    }
    double rx_cost(std::size_t bytes) const {
        return rx_fixed_j + rx_per_byte_j * static_cast<double>(bytes);
    }
};

struct UnknownNodeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

inline bool in_range(const Position& a, const Position& b, double range_m) {
    return distance(a, b) <= range_m;
}

/// Nodes (other than `node` itself) within radio range. `alive[i]` may be
/// empty to mean "all alive". Result is sorted by id.
inline std::vector<NodeId> neighbors_in_range(NodeId node, std::span<const Position> positions,
                                              double range_m,
                                              std::span<const bool> alive = {}) {
    if (node >= positions.size()) {
        throw UnknownNodeError("unknown node " + std::to_string(node));
    }
    std::vector<NodeId> out;
    for (NodeId i = 0; i < positions.size(); ++i) {
        if (i == node) continue;
        if (!alive.empty() && !alive[i]) continue;
        if (in_range(positions[node], positions[i], range_m)) out.push_back(i);
    }
    return out;
}

} // namespace sauav
