#pragma once

namespace sauav {

/// Per-node battery. Consumption is tracked as a running sum so that
/// initial - remaining == total charged holds exactly.
class EnergyState {
public:
    EnergyState() = default;
    EnergyState(double initial_j, double death_threshold_j)
        : initial_j_(initial_j), threshold_j_(death_threshold_j) {}

    double initial() const { return initial_j_; }
    double remaining() const { return initial_j_ - consumed_j_; }
    double consumed() const { return consumed_j_; }
    double threshold() const { return threshold_j_; }
    bool alive() const { return remaining() > threshold_j_; }

    /// Deduct `joules`; returns true when this charge crosses the death
    /// threshold. Charging a dead node is a no-op.
    bool charge(double joules) {
        if (!alive()) return false;
        consumed_j_ += joules;
        return !alive();
    }

private:
    double initial_j_ = 100.0;
    double consumed_j_ = 0.0;
    double threshold_j_ = 5.0;
};

} // namespace sauav
