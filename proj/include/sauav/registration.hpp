#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "sauav/group.hpp"
#include "sauav/radio.hpp"
#include "sauav/rng.hpp"

namespace sauav::crypto {

struct DuplicateRegistration : std::logic_error {
    using std::logic_error::logic_error;
};

/// Key material held by one UAV after registration.
struct NodeKeys {
    Scalar id = 0;          // identity scalar ID_A
    Scalar signed_id = 0;   // ID_A' = ID_A * PR_TA (issued by the authority)
    Scalar private_key = 0; // P_A
    Element public_key = 1; // PU_A = P_A * Z
};

/// Pre-deployment authority: holds the network private key, signs node
/// identities, and keeps the roster of registered nodes.
class TrustedAuthority {
public:
    TrustedAuthority(const CyclicGroup& group, Scalar private_key)
        : group_(&group),
          private_key_(group.reduce_scalar(private_key)),
          public_key_(group.scale(private_key_, group.generator())) {
        if (private_key_ == 0) throw std::invalid_argument("authority private key must be nonzero");
    }

    const CyclicGroup& group() const { return *group_; }
    Element public_key() const { return public_key_; }

    /// Signs `identity` for `node` and records it in the roster.
    Scalar register_node(NodeId node, Scalar identity) {
        if (identity == 0 || identity >= group_->order()) {
            throw std::invalid_argument("identity scalar out of range");
        }
        if (roster_.contains(node)) {
            throw DuplicateRegistration("node " + std::to_string(node) + " already registered");
        }
        roster_.emplace(node, identity);
        return group_->scalar_mul(identity, private_key_);
    }

    const std::map<NodeId, Scalar>& roster() const { return roster_; }

private:
    const CyclicGroup* group_;
    Scalar private_key_;
    Element public_key_;
    std::map<NodeId, Scalar> roster_;
};

/// Checks signed_id * Z == id * PU_TA.
inline bool verify_registration(const CyclicGroup& group, Scalar id, Scalar signed_id,
                                Element authority_public_key) {
    return group.scale(signed_id, group.generator()) == group.scale(id, authority_public_key);
}

/// Draws a key pair and registers the node, returning complete key material.
inline NodeKeys issue_node_keys(TrustedAuthority& ta, NodeId node, Scalar identity, Rng& rng) {
    const CyclicGroup& g = ta.group();
    NodeKeys keys;
    keys.id = identity;
    keys.signed_id = ta.register_node(node, identity);
    keys.private_key = 1 + rng.below(g.order() - 1);
    keys.public_key = g.scale(keys.private_key, g.generator());
    return keys;
}

} // namespace sauav::crypto
