#pragma once

#include <cstdint>
#include <random>

#include "sauav/time.hpp"

namespace sauav {

/// SplitMix64 mixing step. Used to derive well-separated stream seeds from a
/// base seed plus stream identifiers.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0) {
    return splitmix64(splitmix64(base ^ 0xA3C59AC2B7F30E11ULL) ^ splitmix64(stream) ^
                      splitmix64(index * 0x9E3779B97F4A7C15ULL + 0x7F4A7C15ULL));
}

/// Deterministic RNG stream. The engine (mt19937_64) is bit-exact per the
/// standard; bounded and real draws are implemented here rather than with
/// std distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    SimTime uniform_time(SimTime lo, SimTime hi) {
        const auto span = static_cast<std::uint64_t>(hi.micros() - lo.micros());
        if (span == 0) return lo;
        return SimTime::from_micros(lo.micros() + static_cast<std::int64_t>(below(span + 1)));
    }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace sauav
