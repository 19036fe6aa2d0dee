#pragma once

#include <algorithm>
#include <cmath>

#include "sauav/rng.hpp"

namespace sauav {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline Position random_position(double arena_side, Rng& rng) {
    return Position{rng.uniform(0.0, arena_side), rng.uniform(0.0, arena_side)};
}

/// One random-waypoint advance of dt seconds at the given speed. The node
/// moves straight toward `waypoint`; on reaching it within this step the
/// position clamps at the waypoint and a fresh uniform waypoint is drawn.
inline void advance_waypoint_leg(Position& pos, Position& waypoint, double speed_mps,
                                 double dt_s, double arena_side, Rng& rng) {
    if (speed_mps <= 0.0 || dt_s <= 0.0) return;
    const double step = speed_mps * dt_s;
    const double dist = distance(pos, waypoint);
    if (dist <= step) {
        pos = waypoint;
        waypoint = random_position(arena_side, rng);
    } else {
        pos.x += (waypoint.x - pos.x) / dist * step;
        pos.y += (waypoint.y - pos.y) / dist * step;
    }
    pos.x = std::clamp(pos.x, 0.0, arena_side);
    pos.y = std::clamp(pos.y, 0.0, arena_side);
}

} // namespace sauav
