#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sauav/adversary.hpp"
#include "sauav/detection.hpp"
#include "sauav/mobility.hpp"
#include "sauav/radio.hpp"
#include "sauav/toml.hpp"

namespace sauav {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& msg)
        : std::runtime_error(field + ": " + msg), field_name(field) {}
    std::string field_name;
};

struct AgentConfig {
    double period_min_s = 5.0;
    double period_max_s = 10.0;
    double migration_timeout_s = 0.5;
    double retry_backoff_min_s = 0.1;
    double retry_backoff_max_s = 0.4;
    double fraction = 0.2;
    double dwell_s = 0.010;             // handshake residency at the visited node
    double first_cycle_stagger_s = 0.1; // spacing between agents' first cycles
};

struct TrafficConfig {
    std::uint32_t flows = 10;
    double rate_pps = 4.0;
    std::uint16_t payload_bytes = 512;
    double start_s = 30.0;
};

struct EnergyConfig {
    double initial_j = 100.0;
    double death_threshold_fraction = 0.05;
};

struct AdversaryMixConfig {
    double blackhole = 1.0; // relative weights
    double grayhole = 0.0;
    double sinkhole = 0.0;
    double grayhole_drop_ratio = 0.5;
    bool captures_agents = false;
    bool injects_fake_agents = false;
    double fake_agent_rate_pps = 0.2;
    bool false_confidence = false;
};

struct RoutingConfig {
    double reply_window_s = 0.2;
    double route_expiry_s = 10.0;
    double pending_timeout_s = 1.0;
    std::size_t pending_queue_cap = 50;
    bool warning_auth = true; // warnings heeded only from apparent agent nodes
};

/// Complete description of one simulation run.
struct ScenarioConfig {
    std::uint32_t n_uavs = 100;
    double malicious_fraction = 0.0;
    double sim_time_s = 200.0;
    std::uint64_t seed = 1;
    double arena_m = 2000.0;
    double uav_speed_mps = 20.0; // paper setup uses 180; see configs/table8.toml
    double hello_period_s = 1.0;
    double neighbor_expiry_periods = 3.0;
    double mobility_tick_s = 0.1;
    double housekeeping_period_s = 1.0;
    double rss_eviction_threshold = 0.0; // rss proxy = range - distance
    double auth_freshness_window_s = 2.0;
    bool defense_enabled = true;

    RadioModel radio;
    AgentConfig agent;
    DetectorConfig detector;
    TrafficConfig traffic;
    EnergyConfig energy;
    AdversaryMixConfig mix;
    RoutingConfig routing;
    CodecConfig codec;

    // Fixture overrides for table-topology tests; not part of the file schema.
    std::optional<std::vector<Position>> fixed_positions;
    std::optional<std::vector<NodeId>> fixed_agents;
    std::optional<std::map<NodeId, AdversaryProfile>> fixed_adversaries;
    std::optional<std::vector<std::pair<NodeId, NodeId>>> fixed_flows;

    void validate() const {
        if (n_uavs < 2) throw ConfigError("n_uavs", "need at least 2 nodes");
        if (malicious_fraction < 0.0 || malicious_fraction >= 1.0) {
            throw ConfigError("malicious_fraction", "must be in [0,1)");
        }
        if (sim_time_s <= 0.0) throw ConfigError("sim_time", "must be positive");
        if (arena_m <= 0.0) throw ConfigError("arena", "must be positive");
        if (radio.range_m <= 0.0) throw ConfigError("radio.range", "must be positive");
        if (radio.per_hop_delay <= sim_time_zero) {
            throw ConfigError("radio.per_hop_delay", "must be positive");
        }
        if (radio.tx_fixed_j < 0 || radio.tx_per_byte_j < 0 || radio.rx_fixed_j < 0 ||
            radio.rx_per_byte_j < 0) {
            throw ConfigError("radio.costs", "must be nonnegative");
        }
        if (agent.fraction <= 0.0 || agent.fraction > 1.0) {
            throw ConfigError("agent.fraction", "must be in (0,1]");
        }
        if (agent.period_min_s <= 0.0 || agent.period_min_s > agent.period_max_s) {
            throw ConfigError("agent.period", "need 0 < min <= max");
        }
        if (mix.blackhole < 0 || mix.grayhole < 0 || mix.sinkhole < 0) {
            throw ConfigError("adversary.weights", "must be nonnegative");
        }
        if (malicious_fraction > 0.0 && mix.blackhole + mix.grayhole + mix.sinkhole <= 0.0) {
            throw ConfigError("adversary.weights", "at least one attack weight must be positive");
        }
        if (mix.grayhole > 0.0 &&
            (mix.grayhole_drop_ratio <= 0.0 || mix.grayhole_drop_ratio >= 1.0)) {
            throw ConfigError("adversary.grayhole_drop_ratio", "must be strictly inside (0,1)");
        }
        if (detector.forward_ratio_threshold <= 0.0 || detector.forward_ratio_threshold >= 1.0) {
            throw ConfigError("detector.forward_ratio_threshold", "must be in (0,1)");
        }
        if (detector.vote_quorum <= 0.0 || detector.vote_quorum > 1.0) {
            throw ConfigError("detector.vote_quorum", "must be in (0,1]");
        }
        if (traffic.payload_bytes == 0) throw ConfigError("traffic.payload_bytes", "must be > 0");
        if (traffic.rate_pps <= 0.0) throw ConfigError("traffic.rate", "must be positive");
        if (energy.initial_j <= 0.0) throw ConfigError("energy.initial", "must be positive");
        if (energy.death_threshold_fraction < 0.0 || energy.death_threshold_fraction >= 1.0) {
            throw ConfigError("energy.death_threshold_fraction", "must be in [0,1)");
        }
        if (fixed_positions && fixed_positions->size() != n_uavs) {
            throw ConfigError("fixed_positions", "must list exactly n_uavs positions");
        }
    }
};

/// Loads a scenario from a TOML document; missing keys keep defaults.
inline ScenarioConfig scenario_from_toml(const toml::Document& doc) {
    ScenarioConfig c;
    c.n_uavs = static_cast<std::uint32_t>(doc.get_int("n_uavs", c.n_uavs));
    c.malicious_fraction = doc.get_double("malicious_fraction", c.malicious_fraction);
    c.sim_time_s = doc.get_double("sim_time", c.sim_time_s);
    c.seed = static_cast<std::uint64_t>(doc.get_int("seed", static_cast<std::int64_t>(c.seed)));
    c.arena_m = doc.get_double("arena", c.arena_m);
    c.uav_speed_mps = doc.get_double("uav_speed", c.uav_speed_mps);
    c.hello_period_s = doc.get_double("hello_period", c.hello_period_s);
    c.defense_enabled = doc.get_bool("defense", c.defense_enabled);

    c.radio.range_m = doc.get_double("radio.range", c.radio.range_m);
    c.radio.per_hop_delay =
        SimTime::from_seconds(doc.get_double("radio.per_hop_delay", c.radio.per_hop_delay.seconds()));
    c.radio.tx_fixed_j = doc.get_double("radio.tx_fixed_j", c.radio.tx_fixed_j);
    c.radio.tx_per_byte_j = doc.get_double("radio.tx_per_byte_j", c.radio.tx_per_byte_j);
    c.radio.rx_fixed_j = doc.get_double("radio.rx_fixed_j", c.radio.rx_fixed_j);
    c.radio.rx_per_byte_j = doc.get_double("radio.rx_per_byte_j", c.radio.rx_per_byte_j);

    c.agent.fraction = doc.get_double("agent.fraction", c.agent.fraction);
    c.agent.period_min_s = doc.get_double("agent.period_min", c.agent.period_min_s);
    c.agent.period_max_s = doc.get_double("agent.period_max", c.agent.period_max_s);
    c.agent.migration_timeout_s =
        doc.get_double("agent.migration_timeout", c.agent.migration_timeout_s);
    c.agent.retry_backoff_min_s =
        doc.get_double("agent.retry_backoff_min", c.agent.retry_backoff_min_s);
    c.agent.retry_backoff_max_s =
        doc.get_double("agent.retry_backoff_max", c.agent.retry_backoff_max_s);
    c.agent.dwell_s = doc.get_double("agent.dwell", c.agent.dwell_s);
    c.agent.first_cycle_stagger_s =
        doc.get_double("agent.first_cycle_stagger", c.agent.first_cycle_stagger_s);

    c.detector.window = SimTime::from_seconds(
        doc.get_double("detector.window", c.detector.window.seconds()));
    c.detector.n_min = static_cast<std::uint64_t>(
        doc.get_int("detector.n_min", static_cast<std::int64_t>(c.detector.n_min)));
    c.detector.forward_ratio_threshold =
        doc.get_double("detector.forward_ratio_threshold", c.detector.forward_ratio_threshold);
    c.detector.vote_quorum = doc.get_double("detector.vote_quorum", c.detector.vote_quorum);
    c.detector.earliest_margin = SimTime::from_seconds(
        doc.get_double("detector.earliest_margin", c.detector.earliest_margin.seconds()));

    c.traffic.flows = static_cast<std::uint32_t>(doc.get_int("traffic.flows", c.traffic.flows));
    c.traffic.rate_pps = doc.get_double("traffic.rate", c.traffic.rate_pps);
    c.traffic.payload_bytes =
        static_cast<std::uint16_t>(doc.get_int("traffic.payload_bytes", c.traffic.payload_bytes));
    c.traffic.start_s = doc.get_double("traffic.start", c.traffic.start_s);

    c.energy.initial_j = doc.get_double("energy.initial", c.energy.initial_j);
    c.energy.death_threshold_fraction =
        doc.get_double("energy.death_threshold_fraction", c.energy.death_threshold_fraction);

    c.mix.blackhole = doc.get_double("adversary.blackhole", c.mix.blackhole);
    c.mix.grayhole = doc.get_double("adversary.grayhole", c.mix.grayhole);
    c.mix.sinkhole = doc.get_double("adversary.sinkhole", c.mix.sinkhole);
    c.mix.grayhole_drop_ratio =
        doc.get_double("adversary.grayhole_drop_ratio", c.mix.grayhole_drop_ratio);
    c.mix.captures_agents = doc.get_bool("adversary.captures_agents", c.mix.captures_agents);
    c.mix.injects_fake_agents =
        doc.get_bool("adversary.injects_fake_agents", c.mix.injects_fake_agents);
    c.mix.fake_agent_rate_pps =
        doc.get_double("adversary.fake_agent_rate", c.mix.fake_agent_rate_pps);
    c.mix.false_confidence = doc.get_bool("adversary.false_confidence", c.mix.false_confidence);

    c.routing.reply_window_s = doc.get_double("routing.reply_window", c.routing.reply_window_s);
    c.routing.route_expiry_s = doc.get_double("routing.route_expiry", c.routing.route_expiry_s);
    c.routing.pending_timeout_s =
        doc.get_double("routing.pending_timeout", c.routing.pending_timeout_s);
    c.routing.warning_auth = doc.get_bool("routing.warning_auth", c.routing.warning_auth);

    c.validate();
    return c;
}

inline ScenarioConfig scenario_from_file(const std::string& path) {
    return scenario_from_toml(toml::parse_file(path));
}

} // namespace sauav
