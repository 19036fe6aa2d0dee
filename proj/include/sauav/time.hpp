#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace sauav {

/// Simulation time as fixed-point microseconds. Integer representation keeps
/// event ordering reproducible across runs and platforms.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
    static constexpr SimTime from_millis(std::int64_t ms) { return SimTime(ms * 1000); }
    static SimTime from_seconds(double s) {
        return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
    }

    constexpr std::int64_t micros() const { return micros_; }
    constexpr double seconds() const { return static_cast<double>(micros_) * 1e-6; }

    constexpr SimTime operator+(SimTime other) const { return SimTime(micros_ + other.micros_); }
    constexpr SimTime operator-(SimTime other) const { return SimTime(micros_ - other.micros_); }
    constexpr SimTime& operator+=(SimTime other) {
        micros_ += other.micros_;
        return *this;
    }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime(micros_ * k); }

    constexpr auto operator<=>(const SimTime&) const = default;

    std::string str() const { return std::to_string(micros_) + "us"; }

private:
    constexpr explicit SimTime(std::int64_t us) : micros_(us) {}
    std::int64_t micros_ = 0;
};

constexpr SimTime sim_time_zero{};

} // namespace sauav
