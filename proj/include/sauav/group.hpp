#pragma once

#include <cstdint>
#include <stdexcept>

namespace sauav::crypto {

using Scalar = std::uint64_t;
using Element = std::uint64_t;

/// Prime-order cyclic group realized as the order-q subgroup of the
/// multiplicative integers modulo a prime p, written additively:
/// "element + element" is modular multiplication and "scalar * element" is
/// modular exponentiation. Scalars live in Z_q.
///
/// Two instantiations ship: a 61-bit group for regular use and a tiny q=101
/// group small enough for exhaustive tests.
class CyclicGroup {
public:
    constexpr CyclicGroup(Element p, Scalar q, Element g) : p_(p), q_(q), g_(g) {}

    /// Safe-prime group: p = 2q + 1, generator of the order-q subgroup.
    static const CyclicGroup& standard() {
        static constexpr CyclicGroup g{2305843009213691579ULL, 1152921504606845789ULL, 4ULL};
        return g;
    }

    /// Order-101 subgroup of Z_607^*; exhaustively testable.
    static const CyclicGroup& toy() {
        static constexpr CyclicGroup g{607ULL, 101ULL, 64ULL};
        return g;
    }

    Element modulus() const { return p_; }
    Scalar order() const { return q_; }
    Element generator() const { return g_; }
    Element identity() const { return 1; }

    Scalar reduce_scalar(Scalar a) const { return a % q_; }
    Scalar scalar_mul(Scalar a, Scalar b) const {
        return static_cast<Scalar>((static_cast<unsigned __int128>(a % q_) * (b % q_)) % q_);
    }

    /// Group operation ("element + element").
    Element add(Element a, Element b) const { return mul_mod(a, b); }

    /// k-fold group operation ("scalar * element").
    Element scale(Scalar k, Element e) const { return pow_mod(e, k % q_); }

    /// Inverse group operation ("element - element").
    Element sub(Element a, Element b) const { return mul_mod(a, invert(b)); }

    Element invert(Element e) const {
        if (e == 0) throw std::domain_error("zero is not a group element");
        return pow_mod(e, p_ - 2);
    }

    /// Membership test for the order-q subgroup.
    bool contains(Element e) const { return e != 0 && e < p_ && pow_mod(e, q_) == 1; }

private:
    Element mul_mod(Element a, Element b) const {
        return static_cast<Element>((static_cast<unsigned __int128>(a) * b) % p_);
    }

    Element pow_mod(Element base, std::uint64_t exp) const {
        Element result = 1;
        Element acc = base % p_;
        while (exp > 0) {
            if (exp & 1) result = mul_mod(result, acc);
            acc = mul_mod(acc, acc);
            exp >>= 1;
        }
        return result;
    }

    Element p_;
    Scalar q_;
    Element g_;
};

} // namespace sauav::crypto
