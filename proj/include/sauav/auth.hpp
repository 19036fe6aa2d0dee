#pragma once

#include <cstdlib>

#include "sauav/registration.hpp"
#include "sauav/time.hpp"

namespace sauav::crypto {

/// Security-association message sent by a node to a one-hop peer.
struct AuthMessage {
    Element d_prime = 1; // D' = P + K
    Scalar m = 0;        // random scalar, sent in the clear
    SimTime timestamp{};
};

enum class AuthResult { Accepted, StaleTimestamp, AlgebraMismatch };

inline const char* auth_result_name(AuthResult r) {
    switch (r) {
    case AuthResult::Accepted: return "accepted";
    case AuthResult::StaleTimestamp: return "stale_timestamp";
    case AuthResult::AlgebraMismatch: return "algebra_mismatch";
    }
    return "?";
}

/// Sender side: P = ID_A' * P_A * PU_B, K = ID_A' * M * PU_TA, D' = P + K.
inline AuthMessage make_auth(const CyclicGroup& group, const NodeKeys& sender,
                             Element receiver_public_key, Element authority_public_key,
                             Rng& rng, SimTime now) {
    AuthMessage msg;
    msg.m = rng.below(group.order());
    const Element p =
        group.scale(group.scalar_mul(sender.signed_id, sender.private_key), receiver_public_key);
    const Element k =
        group.scale(group.scalar_mul(sender.signed_id, msg.m), authority_public_key);
    msg.d_prime = group.add(p, k);
    msg.timestamp = now;
    return msg;
}

/// Receiver side: after the freshness check, computes D = ID_A' * P_B * PU_A
/// and accepts iff D' - D == ID_A' * M * PU_TA. The sender's signed identity
/// comes from the authority roster distributed at registration time.
inline AuthResult check_auth(const CyclicGroup& group, const NodeKeys& receiver,
                             Scalar sender_signed_id, Element sender_public_key,
                             Element authority_public_key, const AuthMessage& msg, SimTime now,
                             SimTime freshness_window) {
    const std::int64_t age = std::llabs(now.micros() - msg.timestamp.micros());
    if (age > freshness_window.micros()) return AuthResult::StaleTimestamp;

    const Element d =
        group.scale(group.scalar_mul(sender_signed_id, receiver.private_key), sender_public_key);
    const Element lhs = group.sub(msg.d_prime, d);
    const Element rhs =
        group.scale(group.scalar_mul(sender_signed_id, msg.m), authority_public_key);
    return lhs == rhs ? AuthResult::Accepted : AuthResult::AlgebraMismatch;
}

} // namespace sauav::crypto
