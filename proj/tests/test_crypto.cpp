#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include <json.hpp>

#include "sauav/auth.hpp"
#include "sauav/code_chain.hpp"
#include "sauav/group.hpp"
#include "sauav/keyed_hash.hpp"
#include "sauav/registration.hpp"

using namespace sauav;
using namespace sauav::crypto;

namespace {

nlohmann::json load_fixture() {
    std::ifstream in(std::string(SAUAV_FIXTURE_DIR) + "/toy_group_q101.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    auto mulmod = [n](std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e) {
        std::uint64_t res = 1;
        a %= n;
        while (e) {
            if (e & 1) res = mulmod(res, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return res;
    };
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL,
                            31ULL, 37ULL}) {
        if (a % n == 0) continue;
        std::uint64_t x = powmod(a, d);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

} // namespace

TEST_CASE("standard group parameters are a safe-prime subgroup") {
    const CyclicGroup& g = CyclicGroup::standard();
    REQUIRE(is_prime_u64(g.modulus()));
    REQUIRE(is_prime_u64(g.order()));
    REQUIRE(g.modulus() == 2 * g.order() + 1);
    REQUIRE(g.generator() != g.identity());
    REQUIRE(g.contains(g.generator()));
}

TEST_CASE("toy group laws hold exhaustively") {
    const CyclicGroup& g = CyclicGroup::toy();
    REQUIRE(is_prime_u64(g.modulus()));
    REQUIRE(is_prime_u64(g.order()));
    REQUIRE((g.modulus() - 1) % g.order() == 0);
    REQUIRE(g.contains(g.generator()));

    const Element z = g.generator();
    for (Scalar a = 0; a < g.order(); ++a) {
        for (Scalar b = 0; b < g.order(); ++b) {
            // (a*Z) + (b*Z) == (a+b)*Z
            REQUIRE(g.add(g.scale(a, z), g.scale(b, z)) ==
                    g.scale((a + b) % g.order(), z));
        }
    }
    for (Scalar a = 0; a < g.order(); ++a) {
        for (Scalar b : {Scalar{0}, Scalar{1}, Scalar{2}, Scalar{50}, Scalar{100}}) {
            // a*(b*Z) == (ab mod q)*Z
            REQUIRE(g.scale(a, g.scale(b, z)) == g.scale(g.scalar_mul(a, b), z));
        }
    }
    // subtraction inverts addition
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Element a = g.scale(rng.below(g.order()), z);
        const Element b = g.scale(rng.below(g.order()), z);
        REQUIRE(g.sub(g.add(a, b), b) == a);
    }
    // all q distinct powers: generator really has order q
    std::set<Element> seen;
    for (Scalar k = 0; k < g.order(); ++k) seen.insert(g.scale(k, z));
    REQUIRE(seen.size() == g.order());
}

TEST_CASE("registration matches the toy fixture") {
    const auto j = load_fixture();
    const CyclicGroup& g = CyclicGroup::toy();
    REQUIRE(j["group"]["p"] == g.modulus());
    REQUIRE(j["group"]["q"] == g.order());
    REQUIRE(j["group"]["generator"] == g.generator());

    NodeId next_node = 0;
    for (const auto& v : j["registration"]) {
        TrustedAuthority ta(g, v["ta_private"].get<Scalar>());
        const Scalar signed_id = ta.register_node(next_node++, v["id"].get<Scalar>());
        REQUIRE(signed_id == v["signed_id"].get<Scalar>());
        REQUIRE(verify_registration(g, v["id"].get<Scalar>(), signed_id, ta.public_key()));
    }
    for (const auto& v : j["registration_negative"]) {
        TrustedAuthority ta(g, v["ta_private"].get<Scalar>());
        REQUIRE_FALSE(verify_registration(g, v["id"].get<Scalar>(), v["signed_id"].get<Scalar>(),
                                          ta.public_key()));
    }
}

TEST_CASE("registration verifies for random identities and rejects perturbations") {
    const CyclicGroup& g = CyclicGroup::standard();
    Rng rng(17);
    TrustedAuthority ta(g, 1 + rng.below(g.order() - 1));
    for (NodeId n = 0; n < 1000; ++n) {
        const Scalar id = 1 + rng.below(g.order() - 1);
        const Scalar signed_id = ta.register_node(n, id);
        REQUIRE(verify_registration(g, id, signed_id, ta.public_key()));
        REQUIRE_FALSE(verify_registration(g, id, (signed_id + 1) % g.order(), ta.public_key()));
    }
}

TEST_CASE("swapped signed identities fail verification") {
    const CyclicGroup& g = CyclicGroup::standard();
    Rng rng(21);
    TrustedAuthority ta(g, 1 + rng.below(g.order() - 1));
    const Scalar id_a = 1 + rng.below(g.order() - 1);
    Scalar id_b = 1 + rng.below(g.order() - 1);
    if (id_b == id_a) id_b = id_a + 1;
    const Scalar sa = ta.register_node(0, id_a);
    const Scalar sb = ta.register_node(1, id_b);
    REQUIRE_FALSE(verify_registration(g, id_a, sb, ta.public_key()));
    REQUIRE_FALSE(verify_registration(g, id_b, sa, ta.public_key()));
}

TEST_CASE("duplicate registration and zero signed id") {
    const CyclicGroup& g = CyclicGroup::toy();
    TrustedAuthority ta(g, 7);
    ta.register_node(4, 5);
    REQUIRE_THROWS_AS(ta.register_node(4, 9), DuplicateRegistration);
    REQUIRE_FALSE(verify_registration(g, 5, 0, ta.public_key()));
}

namespace {
struct AuthParty {
    NodeKeys keys;
};

std::pair<NodeKeys, NodeKeys> make_pair_keys(const CyclicGroup& g, TrustedAuthority& ta,
                                             NodeId a, NodeId b, Rng& rng) {
    NodeKeys ka = issue_node_keys(ta, a, 1 + rng.below(g.order() - 1), rng);
    NodeKeys kb = issue_node_keys(ta, b, 1 + rng.below(g.order() - 1), rng);
    return {ka, kb};
}
} // namespace

TEST_CASE("auth handshake matches the toy fixture, two algebraic routes") {
    const auto j = load_fixture()["auth"];
    const CyclicGroup& g = CyclicGroup::toy();
    TrustedAuthority ta(g, j["ta_private"].get<Scalar>());

    NodeKeys sender;
    sender.id = j["sender_id"].get<Scalar>();
    sender.signed_id = ta.register_node(0, sender.id);
    REQUIRE(sender.signed_id == j["sender_signed_id"].get<Scalar>());
    sender.private_key = j["sender_private"].get<Scalar>();
    sender.public_key = g.scale(sender.private_key, g.generator());

    NodeKeys receiver;
    receiver.private_key = j["receiver_private"].get<Scalar>();
    receiver.public_key = g.scale(receiver.private_key, g.generator());

    const Scalar m = j["m"].get<Scalar>();
    const Element p =
        g.scale(g.scalar_mul(sender.signed_id, sender.private_key), receiver.public_key);
    const Element k = g.scale(g.scalar_mul(sender.signed_id, m), ta.public_key());
    const Element d_prime = g.add(p, k);
    REQUIRE(p == j["p_element"].get<Element>());
    REQUIRE(k == j["k_element"].get<Element>());
    REQUIRE(d_prime == j["d_prime"].get<Element>());

    // fully expanded scalar route: D' = (ID' * P_A * P_B + ID' * M * PR_TA) * Z
    const Scalar exp = (g.scalar_mul(g.scalar_mul(sender.signed_id, sender.private_key),
                                     receiver.private_key) +
                        g.scalar_mul(g.scalar_mul(sender.signed_id, m),
                                     j["ta_private"].get<Scalar>())) %
                       g.order();
    REQUIRE(g.scale(exp, g.generator()) == d_prime);

    const AuthMessage msg{d_prime, m, SimTime::from_seconds(1.0)};
    REQUIRE(check_auth(g, receiver, sender.signed_id, sender.public_key, ta.public_key(), msg,
                       SimTime::from_seconds(1.5),
                       SimTime::from_seconds(2.0)) == AuthResult::Accepted);
}

TEST_CASE("zero random scalar makes D' collapse to P") {
    const CyclicGroup& g = CyclicGroup::toy();
    TrustedAuthority ta(g, 7);
    Rng rng(5);
    auto [sender, receiver] = make_pair_keys(g, ta, 0, 1, rng);
    const Element p =
        g.scale(g.scalar_mul(sender.signed_id, sender.private_key), receiver.public_key);
    const AuthMessage msg{p, 0, SimTime{}};
    REQUIRE(check_auth(g, receiver, sender.signed_id, sender.public_key, ta.public_key(), msg,
                       SimTime{}, SimTime::from_seconds(2.0)) == AuthResult::Accepted);
}

TEST_CASE("repeated make_auth draws different randomness") {
    const CyclicGroup& g = CyclicGroup::standard();
    TrustedAuthority ta(g, 12345);
    Rng rng(8);
    auto [sender, receiver] = make_pair_keys(g, ta, 0, 1, rng);
    const auto m1 = make_auth(g, sender, receiver.public_key, ta.public_key(), rng, SimTime{});
    const auto m2 = make_auth(g, sender, receiver.public_key, ta.public_key(), rng, SimTime{});
    REQUIRE(m1.m != m2.m);
    REQUIRE(m1.d_prime != m2.d_prime);
}

TEST_CASE("auth round-trips for 1000 random key sets and rejects perturbations") {
    const CyclicGroup& g = CyclicGroup::standard();
    Rng rng(33);
    for (int i = 0; i < 1000; ++i) {
        TrustedAuthority ta(g, 1 + rng.below(g.order() - 1));
        auto [sender, receiver] = make_pair_keys(g, ta, 0, 1, rng);
        const SimTime t0 = SimTime::from_seconds(100.0);
        AuthMessage msg = make_auth(g, sender, receiver.public_key, ta.public_key(), rng, t0);
        REQUIRE(check_auth(g, receiver, sender.signed_id, sender.public_key, ta.public_key(),
                           msg, t0, SimTime::from_seconds(2.0)) == AuthResult::Accepted);

        AuthMessage tampered_m = msg;
        tampered_m.m = (tampered_m.m + 1) % g.order();
        REQUIRE(check_auth(g, receiver, sender.signed_id, sender.public_key, ta.public_key(),
                           tampered_m, t0, SimTime::from_seconds(2.0)) ==
                AuthResult::AlgebraMismatch);

        AuthMessage tampered_d = msg;
        tampered_d.d_prime = g.add(tampered_d.d_prime, g.generator());
        REQUIRE(check_auth(g, receiver, sender.signed_id, sender.public_key, ta.public_key(),
                           tampered_d, t0, SimTime::from_seconds(2.0)) ==
                AuthResult::AlgebraMismatch);

        REQUIRE(check_auth(g, receiver, (sender.signed_id + 1) % g.order(), sender.public_key,
                           ta.public_key(), msg, t0, SimTime::from_seconds(2.0)) ==
                AuthResult::AlgebraMismatch);

        REQUIRE(check_auth(g, receiver, sender.signed_id,
                           g.add(sender.public_key, g.generator()), ta.public_key(), msg, t0,
                           SimTime::from_seconds(2.0)) == AuthResult::AlgebraMismatch);
    }
}

TEST_CASE("stale timestamps are rejected before any algebra") {
    const CyclicGroup& g = CyclicGroup::standard();
    TrustedAuthority ta(g, 999);
    Rng rng(4);
    auto [sender, receiver] = make_pair_keys(g, ta, 0, 1, rng);
    const SimTime sent_at = SimTime::from_seconds(10.0);
    const AuthMessage msg =
        make_auth(g, sender, receiver.public_key, ta.public_key(), rng, sent_at);
    REQUIRE(check_auth(g, receiver, sender.signed_id, sender.public_key, ta.public_key(), msg,
                       SimTime::from_seconds(13.0),
                       SimTime::from_seconds(2.0)) == AuthResult::StaleTimestamp);
}

TEST_CASE("sha3-256 known answer") {
    const std::uint8_t abc[] = {'a', 'b', 'c'};
    REQUIRE(hex(sha3_256(std::span<const std::uint8_t>(abc, 3))) ==
            "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
}

TEST_CASE("keyed hashes are deterministic and independent per key") {
    Rng rng(77);
    const KeyedHash agent(random_code_word(rng));
    const KeyedHash node(random_code_word(rng));
    for (int i = 0; i < 100; ++i) {
        const CodeWord x = random_code_word(rng);
        REQUIRE(agent(x) == agent(x));
        REQUIRE(agent(x) != node(x));
    }
}

TEST_CASE("provisioned chain satisfies the code equalities") {
    Rng rng(6);
    const auto material = provision_chain(random_code_word(rng), random_code_word(rng),
                                          random_code_word(rng), 2);
    REQUIRE(material.node.code2 == derive_code2(material.agent.agent_hash, material.node.code1));
    REQUIRE(material.agent.code3_expected ==
            derive_code3(material.node.node_hash, material.node.code2));
    REQUIRE(derive_code2(material.agent.agent_hash, material.node.code1) ==
            derive_code2(material.agent.agent_hash, material.node.code1));
}

TEST_CASE("data masking: zero mask, exhaustive round-trip, width checks") {
    REQUIRE(mask_data(0, 3, 2) == 3); // all-zero mask is the identity
    for (std::uint8_t code = 0; code < 4; ++code) {
        for (std::uint8_t data = 0; data < 4; ++data) {
            const auto masked = mask_data(code, data, 2);
            REQUIRE(unmask_data(code, masked, 2) == data);
            if (code != 0) REQUIRE(masked != data); // nonzero mask always disguises
        }
    }
    // a wrong data code never recovers the original for a nonzero mask delta
    for (std::uint8_t code = 1; code < 4; ++code) {
        const auto masked = mask_data(0, 2, 2);
        REQUIRE(unmask_data(code, masked, 2) != 2);
    }
    REQUIRE_THROWS_AS(mask_data(4, 0, 2), WidthMismatchError);
    REQUIRE_THROWS_AS(mask_data(0, 9, 3), WidthMismatchError);
    REQUIRE_THROWS_AS(mask_data(0, 0, 0), WidthMismatchError);
}
