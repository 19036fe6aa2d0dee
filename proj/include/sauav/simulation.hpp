#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sauav/adversary.hpp"
#include "sauav/agent_codec.hpp"
#include "sauav/auth.hpp"
#include "sauav/code_chain.hpp"
#include "sauav/detection.hpp"
#include "sauav/energy.hpp"
#include "sauav/event_queue.hpp"
#include "sauav/metrics.hpp"
#include "sauav/mobility.hpp"
#include "sauav/neighbor_matrix.hpp"
#include "sauav/packet.hpp"
#include "sauav/registration.hpp"
#include "sauav/rng.hpp"
#include "sauav/scenario.hpp"
#include "sauav/trace.hpp"

namespace sauav {

/// Picks ceil(fraction * n) distinct agent hosts uniformly. Ground truth is
/// not consulted: attackers can be drawn too.
inline std::vector<NodeId> seed_agents(std::uint32_t n_nodes, double fraction, Rng& rng) {
    const auto count = static_cast<std::uint32_t>(
        std::min<double>(n_nodes, std::ceil(fraction * static_cast<double>(n_nodes))));
    std::vector<NodeId> ids(n_nodes);
    for (NodeId i = 0; i < n_nodes; ++i) ids[i] = i;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng.below(n_nodes - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

enum class HandshakeOutcome { MutualTrust, AgentRejectsNode, NodeRejectsAgent };

inline const char* handshake_outcome_name(HandshakeOutcome o) {
    switch (o) {
    case HandshakeOutcome::MutualTrust: return "mutual_trust";
    case HandshakeOutcome::AgentRejectsNode: return "agent_rejects_node";
    case HandshakeOutcome::NodeRejectsAgent: return "node_rejects_agent";
    }
    return "?";
}

struct RouteEntry {
    NodeId next_hop = 0;
    std::uint32_t seq_no = 0;
    std::uint16_t hop_count = 0;
    SimTime expiry{};
};

class Simulation {
public:
    // --- event payloads (kinds per EventKind; see OUTPUT.md for the mapping) ---
    struct AgentTransfer {
        enum class Purpose { Visit, Return, Handoff };
        bool genuine = true;
        NodeId agent_home = 0;
        Purpose purpose = Purpose::Visit;
    };

    struct CycleStartEv {
        NodeId home;
    };
    struct ReturnDispatchEv {
        NodeId host;
        std::uint64_t visit_id;
    };
    struct MoveEv {};
    struct HelloRoundEv {};
    struct FlowSendEv {
        std::uint32_t flow_index;
    };
    struct ReplyWindowEv {
        NodeId origin;
        std::uint32_t request_id;
    };
    struct VisitTimeoutEv {
        NodeId home;
        std::uint64_t token;
    };
    struct RetryDispatchEv {
        NodeId home;
        std::uint64_t token;
    };
    struct FakeAgentEv {
        NodeId attacker;
    };
    struct HousekeepEv {};
    struct SimEndEv {};

    struct DeliveryEvPayload {
        NodeId from;
        NodeId to;
        Packet pkt;
        std::optional<AgentTransfer> transfer;
    };

    using EventPayload =
        std::variant<DeliveryEvPayload, CycleStartEv, ReturnDispatchEv, MoveEv, HelloRoundEv,
                     FlowSendEv, ReplyWindowEv, VisitTimeoutEv, RetryDispatchEv, FakeAgentEv,
                     HousekeepEv, SimEndEv>;

    // --- per-node protocol state ---
    struct SmartAgentState {
        NodeId home = 0;
        bool genuine = true;
        crypto::AgentProvisioning secrets;
        enum class Phase { Idle, Visiting } phase = Phase::Idle;
        NodeId visiting = 0;
        SimTime departure{};
        int attempt = 1;
        std::uint64_t token = 0; // bumps on dispatch/resolution; guards stale timers
        bool cycle_timer_pending = false;
        std::deque<NodeId> cycle_queue;
    };

    struct HostedVisit {
        std::uint64_t id = 0;
        NodeId agent_home = 0;
        bool genuine = true;
        HandshakeOutcome outcome = HandshakeOutcome::MutualTrust;
        SimTime departs{};
    };

    struct ReplyRecord {
        NodeId replier = 0;
        NodeId via = 0;
        std::uint32_t seq = 0;
        std::uint16_t hops = 0;
        SimTime at{};
        bool usable = true; // false: seen by the detector but barred from routing
    };

    struct PendingDiscovery {
        NodeId dst = 0;
        bool open = true;
        std::vector<ReplyRecord> replies;
    };

    struct PendingPacket {
        Data pkt;
        SimTime deadline{};
    };

    struct JudgementRound {
        NodeId subject = 0;
        SimTime opened{};
        BehaviorCounters own_snapshot;
        std::vector<CommentReply> replies;
        std::set<NodeId> responders;
    };

    struct NodeState {
        explicit NodeState(std::uint64_t rng_seed) : rng(rng_seed) {}

        NodeId id = 0;
        Position pos{};
        Position waypoint{};
        EnergyState energy;
        bool alive = true;
        crypto::NodeKeys keys;
        bool provisioned = true;
        std::optional<AdversaryProfile> adversary;
        NeighborMatrix matrix;
        std::map<NodeId, RouteEntry> routes;
        std::set<std::pair<NodeId, std::uint32_t>> rreq_seen;
        std::map<std::uint32_t, PendingDiscovery> discoveries;
        std::map<NodeId, std::vector<PendingPacket>> pending;
        std::map<NodeId, BehaviorCounters> obs;
        SimTime window_start{};
        std::set<NodeId> quarantined;
        std::map<std::uint32_t, JudgementRound> judgements;
        std::set<NodeId> flagged;
        std::optional<SmartAgentState> agent;
        std::optional<HostedVisit> hosting;
        std::uint32_t next_request_id = 0;
        std::uint32_t seq_no = 1;
        std::uint32_t next_round_id = 0;
        std::uint64_t next_visit_id = 1;
        std::uint64_t listen_violations = 0;
        std::uint64_t untrusted_confidence_drops = 0;
        Rng rng;
    };

    struct FlowState {
        NodeId src = 0;
        NodeId dst = 0;
        std::uint64_t sent = 0;
        std::uint64_t delivered = 0;
        std::uint32_t next_packet_id = 0;
    };

    struct DetectionRecord {
        SimTime at{};
        NodeId by = 0;
        std::string reason;
    };

    Simulation(ScenarioConfig cfg, std::ostream* trace_sink = nullptr)
        : cfg_(std::move(cfg)),
          trace_(trace_sink),
          group_(crypto::CyclicGroup::standard()),
          authority_(make_authority()) {
        cfg_.validate();
        make_network_keys();
        build_nodes();
        seed_adversaries();
        seed_chain();
        seed_agent_nodes();
        build_flows();
        write_preamble();
        schedule_initial_events();
    }

    /// Processes all events up to and including time t (test hook).
    void run_until(SimTime t) {
        while (!ended_ && !queue_.empty() && queue_.next_time() <= t) {
            auto ev = queue_.pop();
            dispatch(ev);
        }
    }

    /// Runs to SimEnd and produces the report.
    MetricsReport run() {
        while (!ended_ && !queue_.empty()) {
            auto ev = queue_.pop();
            dispatch(ev);
        }
        return report();
    }

    SimTime now() const { return queue_.now(); }
    const ScenarioConfig& config() const { return cfg_; }

    enum class ChargeKind { Tx, Rx };

    /// Direct energy charge against one node; a threshold crossing runs the
    /// full death path (handoff, death packet).
    void charge(NodeId id, ChargeKind kind, std::size_t bytes) {
        NodeState& n = nodes_.at(id);
        if (!n.alive) return;
        const double cost =
            kind == ChargeKind::Tx ? cfg_.radio.tx_cost(bytes) : cfg_.radio.rx_cost(bytes);
        if (n.energy.charge(cost)) node_dies(n);
    }

    const NodeState& node(NodeId id) const { return nodes_.at(id); }
    std::size_t node_count() const { return nodes_.size(); }
    const std::set<NodeId>& ground_truth_malicious() const { return ground_truth_; }
    const std::vector<FlowState>& flows() const { return flows_; }
    std::uint64_t comment_request_count() const { return comment_requests_; }
    std::uint64_t sent_total() const { return sent_total_; }
    std::uint64_t delivered_total() const { return delivered_total_; }

    std::set<NodeId> detected_set() const {
        std::set<NodeId> out;
        for (const auto& [n, rec] : detections_) out.insert(n);
        return out;
    }

    MetricsReport report() const {
        MetricsReport r;
        r.sent_total = sent_total_;
        r.received_total = delivered_total_;
        r.pdr = sent_total_ > 0
                    ? 100.0 * static_cast<double>(delivered_total_) / static_cast<double>(sent_total_)
                    : 0.0;
        r.detected = detected_set();
        r.ground_truth_malicious = ground_truth_;
        r.confusion = classify_all(ground_truth_, r.detected, cfg_.n_uavs);
        const Rates rates = compute_rates(r.confusion);
        r.dr = rates.dr;
        r.fp_rate = rates.fp_rate;
        r.fn_rate = rates.fn_rate;
        std::vector<NodeEnergy> energies;
        energies.reserve(nodes_.size());
        for (const NodeState& n : nodes_) {
            energies.push_back({n.energy.remaining(), n.energy.initial()});
        }
        r.re = compute_re(energies);
        r.comment_requests = comment_requests_;
        for (const NodeState& n : nodes_) r.listen_violations += n.listen_violations;
        return r;
    }

private:
    static constexpr std::uint64_t kStreamPlacement = 1;
    static constexpr std::uint64_t kStreamAdversary = 2;
    static constexpr std::uint64_t kStreamAgents = 3;
    static constexpr std::uint64_t kStreamCrypto = 4;
    static constexpr std::uint64_t kStreamFlows = 5;
    static constexpr std::uint64_t kStreamNode = 100;

    // --- construction ---

    crypto::TrustedAuthority make_authority() {
        Rng rng(derive_seed(cfg_.seed, kStreamCrypto, 0));
        return crypto::TrustedAuthority(group_, 1 + rng.below(group_.order() - 1));
    }

    /// Shared verification keypair distributed with the roster: broadcast
    /// HELLOs are authenticated against it, since a broadcast has no single
    /// receiver key to bind to.
    void make_network_keys() {
        Rng rng(derive_seed(cfg_.seed, kStreamCrypto, 3));
        network_keys_.private_key = 1 + rng.below(group_.order() - 1);
        network_keys_.public_key = group_.scale(network_keys_.private_key, group_.generator());
    }

    void build_nodes() {
        Rng placement(derive_seed(cfg_.seed, kStreamPlacement, 0));
        Rng crypto_rng(derive_seed(cfg_.seed, kStreamCrypto, 1));
        nodes_.reserve(cfg_.n_uavs);
        const double threshold = cfg_.energy.initial_j * cfg_.energy.death_threshold_fraction;
        for (NodeId id = 0; id < cfg_.n_uavs; ++id) {
            NodeState n(derive_seed(cfg_.seed, kStreamNode, id));
            n.id = id;
            n.pos = cfg_.fixed_positions ? (*cfg_.fixed_positions)[id]
                                         : random_position(cfg_.arena_m, placement);
            n.waypoint = random_position(cfg_.arena_m, placement);
            n.energy = EnergyState(cfg_.energy.initial_j, threshold);
            n.keys = crypto::issue_node_keys(authority_, id, id + 1, crypto_rng);
            nodes_.push_back(std::move(n));
        }
    }

    void seed_adversaries() {
        if (cfg_.fixed_adversaries) {
            for (const auto& [id, profile] : *cfg_.fixed_adversaries) {
                profile.validate();
                nodes_.at(id).adversary = profile;
                ground_truth_.insert(id);
            }
            return;
        }
        const auto count = static_cast<std::uint32_t>(
            std::floor(cfg_.malicious_fraction * static_cast<double>(cfg_.n_uavs)));
        if (count == 0) return;
        Rng rng(derive_seed(cfg_.seed, kStreamAdversary, 0));
        std::vector<NodeId> ids(cfg_.n_uavs);
        for (NodeId i = 0; i < cfg_.n_uavs; ++i) ids[i] = i;
        for (std::uint32_t i = 0; i < count; ++i) {
            const auto j = i + static_cast<std::uint32_t>(rng.below(cfg_.n_uavs - i));
            std::swap(ids[i], ids[j]);
        }
        ids.resize(count);
        std::sort(ids.begin(), ids.end());
        const double total = cfg_.mix.blackhole + cfg_.mix.grayhole + cfg_.mix.sinkhole;
        for (NodeId id : ids) {
            AdversaryProfile p;
            const double roll = rng.unit() * total;
            if (roll < cfg_.mix.blackhole) {
                p.kind = AttackKind::Blackhole;
            } else if (roll < cfg_.mix.blackhole + cfg_.mix.grayhole) {
                p.kind = AttackKind::Grayhole;
            } else {
                p.kind = AttackKind::Sinkhole;
            }
            p.drop_ratio = cfg_.mix.grayhole_drop_ratio;
            p.captures_agents = cfg_.mix.captures_agents;
            p.injects_fake_agents = cfg_.mix.injects_fake_agents;
            p.fake_agent_rate_pps = cfg_.mix.fake_agent_rate_pps;
            p.false_confidence = cfg_.mix.false_confidence;
            p.validate();
            nodes_[id].adversary = p;
            ground_truth_.insert(id);
        }
    }

    void seed_chain() {
        Rng rng(derive_seed(cfg_.seed, kStreamCrypto, 2));
        const crypto::CodeWord agent_key = crypto::random_code_word(rng);
        const crypto::CodeWord node_key = crypto::random_code_word(rng);
        const crypto::CodeWord code1 = crypto::random_code_word(rng);
        const auto data_code = static_cast<std::uint8_t>(rng.below(1u << cfg_.codec.data_bits));
        chain_ = crypto::provision_chain(agent_key, node_key, code1, data_code,
                                         cfg_.codec.data_bits);
        for (NodeState& n : nodes_) {
            n.provisioned = !n.adversary.has_value();
        }
    }

    void seed_agent_nodes() {
        if (!cfg_.defense_enabled) return;
        std::vector<NodeId> hosts;
        if (cfg_.fixed_agents) {
            hosts = *cfg_.fixed_agents;
        } else {
            Rng rng(derive_seed(cfg_.seed, kStreamAgents, 0));
            hosts = seed_agents(cfg_.n_uavs, cfg_.agent.fraction, rng);
        }
        for (NodeId id : hosts) install_agent(nodes_.at(id));
    }

    void install_agent(NodeState& host) {
        SmartAgentState a;
        a.home = host.id;
        a.genuine = true;
        a.secrets = chain_.agent;
        host.agent = a;
    }

    void build_flows() {
        if (cfg_.fixed_flows) {
            for (const auto& [src, dst] : *cfg_.fixed_flows) {
                flows_.push_back({src, dst});
            }
            return;
        }
        std::vector<NodeId> honest;
        for (const NodeState& n : nodes_) {
            if (!n.adversary) honest.push_back(n.id);
        }
        if (honest.size() < 2 || cfg_.traffic.flows == 0) return;
        Rng rng(derive_seed(cfg_.seed, kStreamFlows, 0));
        for (std::uint32_t i = 0; i < cfg_.traffic.flows; ++i) {
            const NodeId src = honest[rng.below(honest.size())];
            NodeId dst = src;
            while (dst == src) dst = honest[rng.below(honest.size())];
            flows_.push_back({src, dst});
        }
    }

    void write_preamble() {
        if (!trace_.enabled()) return;
        trace_.line(sim_time_zero,
                    "CONFIG n=%u malicious_fraction=%.4f seed=%llu defense=%d arena=%.1f "
                    "range=%.1f speed=%.1f sim_time=%.1f",
                    cfg_.n_uavs, cfg_.malicious_fraction,
                    static_cast<unsigned long long>(cfg_.seed), cfg_.defense_enabled ? 1 : 0,
                    cfg_.arena_m, cfg_.radio.range_m, cfg_.uav_speed_mps, cfg_.sim_time_s);
        for (const NodeState& n : nodes_) {
            if (n.adversary) {
                trace_.line(sim_time_zero, "GT node=%u kind=%s capture=%d", n.id,
                            attack_kind_name(n.adversary->kind),
                            n.adversary->captures_agents ? 1 : 0);
            }
        }
        for (const NodeState& n : nodes_) {
            if (n.agent) trace_.line(sim_time_zero, "AGENT_SEEDED node=%u", n.id);
        }
        for (const FlowState& f : flows_) {
            trace_.line(sim_time_zero, "FLOW src=%u dst=%u", f.src, f.dst);
        }
    }

    void schedule_initial_events() {
        queue_.schedule(sim_time_zero, EventKind::MobilityTick, HelloRoundEv{});
        queue_.schedule(SimTime::from_seconds(cfg_.mobility_tick_s), EventKind::MobilityTick,
                        MoveEv{});
        queue_.schedule(SimTime::from_seconds(cfg_.housekeeping_period_s), EventKind::EnergyCheck,
                        HousekeepEv{});

        // Maintenance (agent cycles) begins after HELLO discovery has run.
        const double maintenance_start = 2.0 * cfg_.hello_period_s;
        std::uint32_t agent_index = 0;
        for (const NodeState& n : nodes_) {
            if (!n.agent) continue;
            const double at =
                maintenance_start + cfg_.agent.first_cycle_stagger_s * agent_index++;
            queue_.schedule(SimTime::from_seconds(at), EventKind::AgentCycleTimer,
                            CycleStartEv{n.id});
        }

        for (std::uint32_t i = 0; i < flows_.size(); ++i) {
            const double period = 1.0 / cfg_.traffic.rate_pps;
            const double at = cfg_.traffic.start_s +
                              period * static_cast<double>(i) / std::max<std::size_t>(1, flows_.size());
            queue_.schedule(SimTime::from_seconds(at), EventKind::TrafficTick, FlowSendEv{i});
        }

        for (const NodeState& n : nodes_) {
            if (n.adversary && n.adversary->injects_fake_agents) {
                queue_.schedule(SimTime::from_seconds(cfg_.traffic.start_s), EventKind::TrafficTick,
                                FakeAgentEv{n.id});
            }
        }

        queue_.schedule(SimTime::from_seconds(cfg_.sim_time_s), EventKind::SimEnd, SimEndEv{});
    }

    // --- main dispatch ---

    void dispatch(SimEvent<EventPayload>& ev) {
        std::visit([this](auto& payload) { this->handle(payload); }, ev.payload);
    }

    void handle(SimEndEv&) {
        ended_ = true;
        if (trace_.enabled()) {
            trace_.line(now(), "END sent=%llu delivered=%llu creq=%llu",
                        static_cast<unsigned long long>(sent_total_),
                        static_cast<unsigned long long>(delivered_total_),
                        static_cast<unsigned long long>(comment_requests_));
            const MetricsReport r = report();
            trace_.line(now(), "REPORT pdr=%s dr=%s fp=%s fn=%s re=%s tp=%u fpn=%u fnn=%u tn=%u",
                        format_double(r.pdr).c_str(), format_optional(r.dr).c_str(),
                        format_optional(r.fp_rate).c_str(), format_optional(r.fn_rate).c_str(),
                        format_double(r.re).c_str(), r.confusion.tp, r.confusion.fp,
                        r.confusion.fn, r.confusion.tn);
        }
    }

    void handle(MoveEv&) {
        const double dt = cfg_.mobility_tick_s;
        for (NodeState& n : nodes_) {
            if (!n.alive) continue;
            advance_waypoint_leg(n.pos, n.waypoint, cfg_.uav_speed_mps, dt, cfg_.arena_m, n.rng);
        }
        queue_.schedule(now() + SimTime::from_seconds(dt), EventKind::MobilityTick, MoveEv{});
    }

    void handle(HelloRoundEv&) {
        for (NodeState& n : nodes_) {
            if (n.alive) broadcast_hello(n);
        }
        queue_.schedule(now() + SimTime::from_seconds(cfg_.hello_period_s),
                        EventKind::MobilityTick, HelloRoundEv{});
    }

    void broadcast_hello(NodeState& n) {
        Hello h;
        h.src = n.id;
        h.auth = crypto::make_auth(group_, n.keys, network_keys_.public_key,
                                   authority_.public_key(), n.rng, now());
        send_broadcast(n, Packet{h});
    }

    void handle(HousekeepEv&) {
        const SimTime cutoff =
            now() - SimTime::from_seconds(cfg_.neighbor_expiry_periods * cfg_.hello_period_s);
        for (NodeState& n : nodes_) {
            if (!n.alive) continue;
            n.matrix.expire_older_than(cutoff); // negative cutoff early on: no-op
            expire_pending(n);
        }
        if (cfg_.defense_enabled) {
            for (NodeState& n : nodes_) {
                if (!n.alive) continue;
                close_due_judgements(n);
                detector_sweep(n);
            }
        }
        queue_.schedule(now() + SimTime::from_seconds(cfg_.housekeeping_period_s),
                        EventKind::EnergyCheck, HousekeepEv{});
    }

    void expire_pending(NodeState& n) {
        for (auto it = n.pending.begin(); it != n.pending.end();) {
            auto& vec = it->second;
            std::erase_if(vec, [&](const PendingPacket& p) { return p.deadline < now(); });
            it = vec.empty() ? n.pending.erase(it) : std::next(it);
        }
    }

    // --- radio primitives ---

    std::size_t charge_tx(NodeState& n, std::size_t bytes) {
        if (n.energy.charge(cfg_.radio.tx_cost(bytes))) node_dies(n);
        return bytes;
    }

    void charge_rx(NodeState& n, std::size_t bytes) {
        if (n.energy.charge(cfg_.radio.rx_cost(bytes))) node_dies(n);
    }

    bool radio_reaches(const NodeState& a, const NodeState& b) const {
        return in_range(a.pos, b.pos, cfg_.radio.range_m);
    }

    void send_unicast(NodeState& from, NodeId to, Packet pkt,
                      std::optional<AgentTransfer> transfer = {}) {
        if (!from.alive) return;
        const std::size_t bytes = wire_size_bytes(pkt);
        observe_transmission(from, to, pkt);
        charge_tx(from, bytes);
        NodeState& dest = nodes_[to];
        if (!dest.alive || !radio_reaches(from, dest)) {
            trace_.line(now(), "DROP node=%u to=%u type=%s reason=out_of_range", from.id, to,
                        packet_type_name(pkt));
            return;
        }
        queue_.schedule(now() + cfg_.radio.per_hop_delay, EventKind::PacketDelivery,
                        DeliveryEvPayload{from.id, to, std::move(pkt), transfer});
    }

    void send_broadcast(NodeState& from, Packet pkt) {
        if (!from.alive) return;
        charge_tx(from, wire_size_bytes(pkt));
        for (NodeState& dest : nodes_) {
            if (dest.id == from.id || !dest.alive) continue;
            if (!radio_reaches(from, dest)) continue;
            queue_.schedule(now() + cfg_.radio.per_hop_delay, EventKind::PacketDelivery,
                            DeliveryEvPayload{from.id, dest.id, pkt, std::nullopt});
        }
    }

    /// Watchdog bookkeeping: everyone in range of a transmitter sees what it
    /// sends. Only transit data (receiver != final destination) counts toward
    /// the receiver's intake; consuming your own traffic is not suspicious.
    void observe_transmission(const NodeState& from, NodeId to, const Packet& pkt) {
        if (const Data* d = std::get_if<Data>(&pkt)) {
            const bool transit = to != d->dst;
            for (NodeState& o : nodes_) {
                if (!o.alive || !radio_reaches(from, o)) continue;
                if (transit && o.id != to) o.obs[to].data_received++;
                if (o.id == from.id) continue; // no self-observation
                if (d->src == from.id) {
                    o.obs[from.id].data_sent++;
                } else {
                    o.obs[from.id].data_forwarded++;
                }
            }
        } else if (const Rrep* r = std::get_if<Rrep>(&pkt)) {
            if (r->src != from.id) return; // relayed replies belong to the replier
            for (NodeState& o : nodes_) {
                if (!o.alive || o.id == from.id) continue;
                if (!radio_reaches(from, o)) continue;
                BehaviorCounters& c = o.obs[from.id];
                c.rrep_sent++;
                c.last_rrep_seq = std::max(c.last_rrep_seq, r->seq_no);
                c.last_rrep_hops = std::max(c.last_rrep_hops, r->hop_count);
            }
        }
    }

    // --- delivery dispatch ---

    void handle(DeliveryEvPayload& ev) {
        NodeState& to = nodes_[ev.to];
        if (!to.alive) return;
        charge_rx(to, wire_size_bytes(ev.pkt));
        if (!to.alive) return; // rx cost was the last straw

        if (auto* h = std::get_if<Hello>(&ev.pkt)) {
            handle_hello(to, *h);
        } else if (auto* rq = std::get_if<Rreq>(&ev.pkt)) {
            handle_rreq(to, ev.from, *rq);
        } else if (auto* rp = std::get_if<Rrep>(&ev.pkt)) {
            handle_rrep(to, ev.from, *rp);
        } else if (auto* d = std::get_if<Data>(&ev.pkt)) {
            handle_data(to, ev.from, *d);
        } else if (auto* a = std::get_if<AgentPacket>(&ev.pkt)) {
            handle_agent_packet(to, ev.from, *a, ev.transfer);
        } else if (auto* c = std::get_if<Confidence>(&ev.pkt)) {
            handle_confidence(to, *c);
        } else if (auto* cr = std::get_if<CommentRequest>(&ev.pkt)) {
            handle_comment_request(to, *cr);
        } else if (auto* crep = std::get_if<CommentReply>(&ev.pkt)) {
            handle_comment_reply(to, *crep);
        } else if (auto* w = std::get_if<Warning>(&ev.pkt)) {
            handle_warning(to, *w);
        } else if (auto* dth = std::get_if<Death>(&ev.pkt)) {
            handle_death_packet(to, *dth);
        } else if (auto* ctl = std::get_if<Control>(&ev.pkt)) {
            handle_control(to, *ctl);
        }
    }

    void handle_hello(NodeState& to, const Hello& h) {
        const crypto::NodeKeys& sender_keys = nodes_[h.src].keys; // roster lookup
        const auto result = crypto::check_auth(
            group_, network_keys_, sender_keys.signed_id, sender_keys.public_key,
            authority_.public_key(), h.auth, now(),
            SimTime::from_seconds(cfg_.auth_freshness_window_s));
        if (result != crypto::AuthResult::Accepted) {
            trace_.line(now(), "AUTH_FAIL node=%u src=%u result=%s", to.id, h.src,
                        auth_result_name(result));
            return;
        }
        if (to.quarantined.contains(h.src)) return;
        to.matrix.process_hello(h.src, now());
    }

    // --- routing ---

    bool sender_trusted(const NodeState& to, NodeId from) const {
        if (!cfg_.defense_enabled) return !to.quarantined.contains(from);
        return to.matrix.is_valid(from) && !to.quarantined.contains(from);
    }

    void handle_rreq(NodeState& to, NodeId from, const Rreq& rreq) {
        if (rreq.src == to.id) return;
        if (!to.adversary) { // attackers ignore the protocol's own trust gates
            if (to.quarantined.contains(rreq.src) || to.quarantined.contains(from)) return;
            if (cfg_.defense_enabled && !to.matrix.is_valid(from)) return;
        }
        if (!to.rreq_seen.insert({rreq.src, rreq.request_id}).second) return;

        RouteEntry reverse;
        reverse.next_hop = from;
        reverse.seq_no = 0;
        reverse.hop_count = static_cast<std::uint16_t>(rreq.hop_count + 1);
        reverse.expiry = now() + SimTime::from_seconds(cfg_.routing.route_expiry_s);
        to.routes[rreq.src] = reverse;

        if (to.adversary && (to.adversary->kind == AttackKind::Blackhole ||
                             to.adversary->kind == AttackKind::Sinkhole)) {
            const Rrep fake = to.adversary->kind == AttackKind::Sinkhole
                                  ? sinkhole_reply(rreq, to.id)
                                  : blackhole_reply(rreq, to.id);
            send_unicast(to, from, Packet{fake});
            return;
        }

        if (rreq.dst == to.id) {
            Rrep r;
            r.src = to.id;
            r.dst = rreq.src;
            r.seq_no = ++to.seq_no;
            r.hop_count = 0;
            r.request_id = rreq.request_id;
            r.route_target = rreq.dst;
            send_unicast(to, from, Packet{r});
            return;
        }

        Rreq fwd = rreq;
        fwd.hop_count++;
        send_broadcast(to, Packet{fwd});
    }

    void handle_rrep(NodeState& to, NodeId from, const Rrep& rrep) {
        if (rrep.dst == to.id) {
            // The originator holds the reply itself: direct evidence the
            // replier sent at least one RREP. Every reply feeds detection,
            // including ones routing refuses to use.
            BehaviorCounters& c = to.obs[rrep.src];
            c.rrep_sent++;
            c.last_rrep_seq = std::max(c.last_rrep_seq, rrep.seq_no);
            c.last_rrep_hops = std::max(c.last_rrep_hops, rrep.hop_count);

            auto it = to.discoveries.find(rrep.request_id);
            if (it == to.discoveries.end() || !it->second.open) return;
            const bool usable = !cfg_.defense_enabled ||
                                (to.matrix.is_valid(from) && !to.quarantined.contains(from) &&
                                 !to.quarantined.contains(rrep.src));
            it->second.replies.push_back(ReplyRecord{
                rrep.src, from, rrep.seq_no, static_cast<std::uint16_t>(rrep.hop_count + 1),
                now(), usable});
            if (!usable) {
                to.listen_violations++;
                trace_.line(now(), "DROP node=%u from=%u type=RREP reason=invalid_sender", to.id,
                            from);
            }
            return;
        }

        if (!to.adversary) {
            if (to.quarantined.contains(rrep.src) || to.quarantined.contains(from)) return;
            if (cfg_.defense_enabled && !to.matrix.is_valid(from)) {
                to.listen_violations++;
                trace_.line(now(), "DROP node=%u from=%u type=RREP reason=invalid_sender", to.id,
                            from);
                return;
            }
        }

        auto back = to.routes.find(rrep.dst);
        if (back == to.routes.end() || back->second.expiry < now()) {
            trace_.line(now(), "DROP node=%u type=RREP reason=no_reverse_route", to.id);
            return;
        }
        RouteEntry fwd_route;
        fwd_route.next_hop = from;
        fwd_route.seq_no = rrep.seq_no;
        fwd_route.hop_count = static_cast<std::uint16_t>(rrep.hop_count + 1);
        fwd_route.expiry = now() + SimTime::from_seconds(cfg_.routing.route_expiry_s);
        to.routes[rrep.route_target] = fwd_route;

        Rrep fwd = rrep;
        fwd.hop_count++;
        send_unicast(to, back->second.next_hop, Packet{fwd});
    }

    void handle(ReplyWindowEv& ev) {
        NodeState& origin = nodes_[ev.origin];
        auto it = origin.discoveries.find(ev.request_id);
        if (it == origin.discoveries.end()) return;
        PendingDiscovery disc = std::move(it->second);
        origin.discoveries.erase(it);
        if (!origin.alive) return;

        feed_reply_round_to_detector(origin, disc);

        const ReplyRecord* best = nullptr;
        for (const ReplyRecord& r : disc.replies) {
            if (!r.usable) continue;
            if (best == nullptr || r.seq > best->seq ||
                (r.seq == best->seq &&
                 (r.hops < best->hops ||
                  (r.hops == best->hops &&
                   (r.at < best->at || (r.at == best->at && r.replier < best->replier)))))) {
                best = &r;
            }
        }
        if (best == nullptr) {
            trace_.line(now(), "NO_ROUTE node=%u dst=%u", origin.id, disc.dst);
            origin.pending.erase(disc.dst);
            return;
        }
        RouteEntry route;
        route.next_hop = best->via;
        route.seq_no = best->seq;
        route.hop_count = best->hops;
        route.expiry = now() + SimTime::from_seconds(cfg_.routing.route_expiry_s);
        origin.routes[disc.dst] = route;
        trace_.line(now(), "ROUTE node=%u dst=%u next=%u seq=%u hops=%u", origin.id, disc.dst,
                    route.next_hop, route.seq_no, route.hop_count);

        auto pending = origin.pending.find(disc.dst);
        if (pending != origin.pending.end()) {
            std::vector<PendingPacket> queued = std::move(pending->second);
            origin.pending.erase(pending);
            for (PendingPacket& p : queued) {
                if (p.deadline >= now()) forward_from_origin(origin, std::move(p.pkt));
            }
        }
    }

    void feed_reply_round_to_detector(NodeState& origin, const PendingDiscovery& disc) {
        if (disc.replies.size() < 2) return;
        std::vector<const ReplyRecord*> by_time;
        for (const ReplyRecord& r : disc.replies) by_time.push_back(&r);
        std::sort(by_time.begin(), by_time.end(), [](const ReplyRecord* a, const ReplyRecord* b) {
            if (a->at != b->at) return a->at < b->at;
            return a->replier < b->replier;
        });
        if (by_time[0]->at + cfg_.detector.earliest_margin <= by_time[1]->at) {
            origin.obs[by_time[0]->replier].earliest_rrep_flag = true;
        }
        std::uint32_t max_seq = 0;
        std::uint16_t min_hops = std::numeric_limits<std::uint16_t>::max();
        for (const ReplyRecord& r : disc.replies) {
            max_seq = std::max(max_seq, r.seq);
            min_hops = std::min(min_hops, r.hops);
        }
        std::size_t matching = 0;
        for (const ReplyRecord& r : disc.replies) {
            if (r.seq == max_seq && r.hops == min_hops) ++matching;
        }
        if (matching > 0 && matching < disc.replies.size()) {
            for (const ReplyRecord& r : disc.replies) {
                if (r.seq == max_seq && r.hops == min_hops) {
                    origin.obs[r.replier].max_seq_min_hops_flag = true;
                }
            }
        }
    }

    void start_discovery(NodeState& origin, NodeId dst) {
        for (const auto& [rid, d] : origin.discoveries) {
            if (d.dst == dst && d.open) return; // one round per destination at a time
        }
        const std::uint32_t request_id = origin.next_request_id++;
        origin.discoveries[request_id] = PendingDiscovery{dst, true, {}};
        Rreq rreq;
        rreq.src = origin.id;
        rreq.dst = dst;
        rreq.request_id = request_id;
        auto known = origin.routes.find(dst);
        rreq.seq_no = known != origin.routes.end() ? known->second.seq_no + 1 : 1;
        rreq.hop_count = 0;
        trace_.line(now(), "RREQ origin=%u dst=%u req=%u", origin.id, dst, request_id);
        send_broadcast(origin, Packet{rreq});
        queue_.schedule(now() + SimTime::from_seconds(cfg_.routing.reply_window_s),
                        EventKind::TrafficTick, ReplyWindowEv{origin.id, request_id});
    }

    void handle(FlowSendEv& ev) {
        FlowState& flow = flows_[ev.flow_index];
        NodeState& src = nodes_[flow.src];
        const double period = 1.0 / cfg_.traffic.rate_pps;
        if (src.alive && nodes_[flow.dst].alive) {
            Data d;
            d.src = flow.src;
            d.dst = flow.dst;
            d.payload_bytes = cfg_.traffic.payload_bytes;
            d.flow_id = ev.flow_index;
            d.packet_id = flow.next_packet_id++;
            d.route.push_back(flow.src);
            flow.sent++;
            sent_total_++;
            trace_.line(now(), "SEND flow=%u pkt=%u src=%u dst=%u", d.flow_id, d.packet_id,
                        d.src, d.dst);
            forward_from_origin(src, std::move(d));
        }
        queue_.schedule(now() + SimTime::from_seconds(period), EventKind::TrafficTick,
                        FlowSendEv{ev.flow_index});
    }

    void forward_from_origin(NodeState& origin, Data pkt) {
        const NodeId dst = pkt.dst;
        if (origin.matrix.contains(dst) && radio_reaches(origin, nodes_[dst])) {
            send_unicast(origin, dst, Packet{std::move(pkt)});
            return;
        }
        auto route = origin.routes.find(dst);
        if (route != origin.routes.end()) {
            if (route->second.expiry < now() ||
                !radio_reaches(origin, nodes_[route->second.next_hop]) ||
                !nodes_[route->second.next_hop].alive) {
                origin.routes.erase(route);
            } else {
                send_unicast(origin, route->second.next_hop, Packet{std::move(pkt)});
                return;
            }
        }
        auto& q = origin.pending[dst];
        if (q.size() < cfg_.routing.pending_queue_cap) {
            q.push_back(PendingPacket{
                std::move(pkt), now() + SimTime::from_seconds(cfg_.routing.pending_timeout_s)});
        } else {
            trace_.line(now(), "DROP node=%u type=DATA reason=queue_full", origin.id);
        }
        start_discovery(origin, dst);
    }

    void handle_data(NodeState& to, NodeId from, Data& d) {
        if (!to.adversary && !sender_trusted(to, from)) {
            to.listen_violations++;
            trace_.line(now(), "DROP node=%u from=%u type=DATA reason=invalid_sender flow=%u",
                        to.id, from, d.flow_id);
            return;
        }
        if (d.dst == to.id) {
            delivered_total_++;
            if (d.flow_id < flows_.size()) flows_[d.flow_id].delivered++;
            if (trace_.enabled()) {
                std::string route_str;
                for (NodeId h : d.route) {
                    if (!route_str.empty()) route_str.push_back('-');
                    route_str += std::to_string(h);
                }
                route_str += "-" + std::to_string(to.id);
                trace_.line(now(), "DELIVER flow=%u pkt=%u dst=%u hops=%zu route=%s", d.flow_id,
                            d.packet_id, to.id, d.route.size(), route_str.c_str());
            }
            return;
        }

        if (to.adversary) {
            switch (to.adversary->kind) {
            case AttackKind::Blackhole:
            case AttackKind::Sinkhole:
                trace_.line(now(), "DROP node=%u type=DATA reason=attack flow=%u pkt=%u", to.id,
                            d.flow_id, d.packet_id);
                return;
            case AttackKind::Grayhole:
                if (grayhole_drops(*to.adversary, to.rng)) {
                    trace_.line(now(), "DROP node=%u type=DATA reason=attack flow=%u pkt=%u",
                                to.id, d.flow_id, d.packet_id);
                    return;
                }
                break;
            }
        }

        auto route = to.routes.find(d.dst);
        if (route == to.routes.end() || route->second.expiry < now()) {
            trace_.line(now(), "DROP node=%u type=DATA reason=no_route flow=%u", to.id, d.flow_id);
            return;
        }
        if (!radio_reaches(to, nodes_[route->second.next_hop]) ||
            !nodes_[route->second.next_hop].alive) {
            to.routes.erase(route);
            trace_.line(now(), "DROP node=%u type=DATA reason=link_break flow=%u", to.id,
                        d.flow_id);
            return;
        }
        d.route.push_back(to.id);
        const NodeId next = route->second.next_hop;
        trace_.line(now(), "FWD node=%u flow=%u pkt=%u to=%u", to.id, d.flow_id, d.packet_id,
                    next);
        send_unicast(to, next, Packet{std::move(d)});
    }

    // --- agent engine ---

    void handle(CycleStartEv& ev) {
        NodeState& h = nodes_[ev.home];
        if (!h.alive || !h.agent) return;
        SmartAgentState& a = *h.agent;
        a.cycle_timer_pending = false;
        if (a.phase != SmartAgentState::Phase::Idle) {
            schedule_next_cycle(h); // previous cycle still draining retries
            return;
        }
        a.cycle_queue.clear();
        for (NodeId n : h.matrix.ids()) a.cycle_queue.push_back(n);
        trace_.line(now(), "CYCLE_START home=%u neighbors=%zu", h.id, a.cycle_queue.size());
        dispatch_next_visit(h);
    }

    void schedule_next_cycle(NodeState& h) {
        if (!h.agent || h.agent->cycle_timer_pending) return;
        h.agent->cycle_timer_pending = true;
        const SimTime next = now() + h.rng.uniform_time(
                                         SimTime::from_seconds(cfg_.agent.period_min_s),
                                         SimTime::from_seconds(cfg_.agent.period_max_s));
        queue_.schedule(next, EventKind::AgentCycleTimer, CycleStartEv{h.id});
    }

    void dispatch_next_visit(NodeState& h) {
        if (!h.agent) return;
        SmartAgentState& a = *h.agent;
        while (!a.cycle_queue.empty()) {
            const NodeId n = a.cycle_queue.front();
            a.cycle_queue.pop_front();
            if (!h.matrix.contains(n) || h.quarantined.contains(n)) continue;
            if (!nodes_[n].alive || !radio_reaches(h, nodes_[n])) {
                trace_.line(now(), "VISIT_SKIP home=%u neighbor=%u reason=out_of_range", h.id, n);
                continue;
            }
            a.phase = SmartAgentState::Phase::Visiting;
            a.visiting = n;
            a.departure = now();
            a.attempt = 1;
            a.token++;
            send_agent_visit(h, n);
            queue_.schedule(now() + SimTime::from_seconds(cfg_.agent.migration_timeout_s),
                            EventKind::MigrationTimeout, VisitTimeoutEv{h.id, a.token});
            return;
        }
        finish_cycle(h);
    }

    AgentPacket build_agent_packet(const NodeState& from, NodeId to,
                                   const crypto::AgentProvisioning& secrets,
                                   std::uint8_t clear_bits) const {
        AgentPacket p;
        p.src_uav = from.id;
        p.dst_uav = to;
        p.code3.assign(secrets.code3_expected.begin(),
                       secrets.code3_expected.begin() + cfg_.codec.code_word_bytes);
        p.data_code = 0; // released only after mutual trust, never in flight
        p.data = crypto::mask_data(secrets.data_code, clear_bits, cfg_.codec.data_bits);
        p.hash_output = agent_packet_digest(p, cfg_.codec);
        return p;
    }

    void send_agent_visit(NodeState& h, NodeId n) {
        const auto* entry = h.matrix.find(n);
        const std::uint8_t bits = static_cast<std::uint8_t>(
            ((entry && entry->valid) ? 2 : 0) | ((entry && entry->agent) ? 1 : 0));
        AgentPacket pkt = build_agent_packet(h, n, h.agent->secrets, bits);
        trace_.line(now(), "AGENT_DISPATCH home=%u to=%u attempt=%d", h.id, n, h.agent->attempt);
        send_unicast(h, n, Packet{std::move(pkt)},
                     AgentTransfer{h.agent->genuine, h.id, AgentTransfer::Purpose::Visit});
    }

    void handle_agent_packet(NodeState& to, NodeId from, const AgentPacket& pkt,
                             const std::optional<AgentTransfer>& transfer) {
        if (!transfer) return;
        switch (transfer->purpose) {
        case AgentTransfer::Purpose::Visit:
            handle_agent_visit(to, from, pkt, *transfer);
            return;
        case AgentTransfer::Purpose::Return:
            handle_agent_return(to, from, pkt, *transfer);
            return;
        case AgentTransfer::Purpose::Handoff:
            handle_agent_handoff(to, *transfer);
            return;
        }
    }

    /// Three-step confidence process, run when an agent lands on a node. The
    /// outcome is a pure function of (agent genuine?, node provisioned?).
    HandshakeOutcome run_handshake(NodeState& host, const AgentTransfer& transfer) {
        const NodeId agent_home = transfer.agent_home;
        trace_.line(now(), "HS agent=%u host=%u step=1", agent_home, host.id);

        // Step 1: agent asks for code 1; an unprovisioned host can only guess.
        const crypto::CodeWord code1_answer =
            host.provisioned ? chain_.node.code1 : crypto::random_code_word(host.rng);

        // Step 2: agent derives code 2; host compares with its stored copy.
        const crypto::CodeWord code2 = transfer.genuine
                                           ? crypto::derive_code2(chain_.agent.agent_hash, code1_answer)
                                           : crypto::random_code_word(host.rng);
        const bool step2_match = host.provisioned && code2 == chain_.node.code2;
        trace_.line(now(), "HS agent=%u host=%u step=2 ok=%d", agent_home, host.id,
                    step2_match ? 1 : 0);
        if (!transfer.genuine) {
            // No host, honest or hostile, can observe a matching code 2.
            trace_.line(now(), "HS agent=%u host=%u outcome=%s", agent_home, host.id,
                        handshake_outcome_name(HandshakeOutcome::NodeRejectsAgent));
            return HandshakeOutcome::NodeRejectsAgent;
        }

        // Step 3: host answers with code 3; an enemy host fakes it and fails.
        const crypto::CodeWord code3 = host.provisioned
                                           ? crypto::derive_code3(chain_.node.node_hash, code2)
                                           : crypto::random_code_word(host.rng);
        const bool step3_match = code3 == chain_.agent.code3_expected;
        trace_.line(now(), "HS agent=%u host=%u step=3 ok=%d", agent_home, host.id,
                    step3_match ? 1 : 0);

        if (step3_match) {
            trace_.line(now(), "HS agent=%u host=%u outcome=%s", agent_home, host.id,
                        handshake_outcome_name(HandshakeOutcome::MutualTrust));
            trace_.line(now(), "RELEASE agent=%u host=%u", agent_home, host.id);
            return HandshakeOutcome::MutualTrust;
        }
        trace_.line(now(), "HS agent=%u host=%u outcome=%s", agent_home, host.id,
                    handshake_outcome_name(HandshakeOutcome::AgentRejectsNode));
        return HandshakeOutcome::AgentRejectsNode;
    }

    void handle_agent_visit(NodeState& host, NodeId from, const AgentPacket& pkt,
                            const AgentTransfer& transfer) {
        // Two agents in the same window: the most recent one is kept.
        if (host.hosting && host.hosting->departs > now()) {
            trace_.line(now(), "AGENT_DISPLACED host=%u old=%u new=%u", host.id,
                        host.hosting->agent_home, transfer.agent_home);
            host.hosting.reset();
        }

        const HandshakeOutcome outcome = run_handshake(host, transfer);

        if (outcome == HandshakeOutcome::MutualTrust) {
            // The host now trusts the agent and its home node; the released
            // data code exposes the packet's data section.
            host.matrix.set_trust(transfer.agent_home, true, true, now());
            (void)crypto::unmask_data(chain_.agent.data_code, pkt.data, cfg_.codec.data_bits);
        }

        const bool captured = host.adversary && host.adversary->captures_agents &&
                              transfer.genuine;
        if (captured) {
            trace_.line(now(), "AGENT_CAPTURED host=%u agent=%u", host.id, transfer.agent_home);
            return;
        }
        if (outcome == HandshakeOutcome::NodeRejectsAgent) return; // agent ignored, no return

        HostedVisit visit;
        visit.id = host.next_visit_id++;
        visit.agent_home = transfer.agent_home;
        visit.genuine = transfer.genuine;
        visit.outcome = outcome;
        visit.departs = now() + SimTime::from_seconds(cfg_.agent.dwell_s);
        host.hosting = visit;
        queue_.schedule(visit.departs, EventKind::AgentCycleTimer,
                        ReturnDispatchEv{host.id, visit.id});
    }

    void handle(ReturnDispatchEv& ev) {
        NodeState& host = nodes_[ev.host];
        if (!host.hosting || host.hosting->id != ev.visit_id) return;
        const HostedVisit visit = *host.hosting;
        host.hosting.reset();
        if (!host.alive) return;

        const bool trusted = visit.outcome == HandshakeOutcome::MutualTrust;
        const std::uint8_t bits =
            static_cast<std::uint8_t>((trusted ? 2 : 0) | ((trusted && host.agent) ? 1 : 0));
        AgentPacket pkt = build_agent_packet(host, visit.agent_home, chain_.agent, bits);
        send_unicast(host, visit.agent_home, Packet{std::move(pkt)},
                     AgentTransfer{visit.genuine, visit.agent_home,
                                   AgentTransfer::Purpose::Return});
    }

    void handle_agent_return(NodeState& home, NodeId from, const AgentPacket& pkt,
                             const AgentTransfer&) {
        if (!home.agent || home.agent->phase != SmartAgentState::Phase::Visiting ||
            home.agent->visiting != from) {
            trace_.line(now(), "AGENT_LATE_RETURN home=%u from=%u", home.id, from);
            return;
        }
        SmartAgentState& a = *home.agent;
        const std::uint8_t bits =
            crypto::unmask_data(a.secrets.data_code, pkt.data, cfg_.codec.data_bits);
        const bool valid = (bits & 2) != 0;
        const bool agent_bit = (bits & 1) != 0;
        trace_.line(now(), "AGENT_RETURN home=%u from=%u valid=%d agent=%d attempt=%d", home.id,
                    from, valid ? 1 : 0, agent_bit ? 1 : 0, a.attempt);

        if (valid) {
            home.matrix.set_trust(from, true, agent_bit, now());
        } else {
            home.matrix.mark_invalid(from);
            flag_aggressor(home, from, "handshake");
        }

        // Mobility check on return: weak neighbors are evicted.
        const double rss = cfg_.radio.range_m - distance(home.pos, nodes_[from].pos);
        const auto* entry = home.matrix.find(from);
        const bool had_agent_bit = entry && entry->agent;
        if (home.matrix.evict_weak(from, rss, cfg_.rss_eviction_threshold)) {
            trace_.line(now(), "EVICT node=%u neighbor=%u rss=%.2f", home.id, from, rss);
            if (!had_agent_bit) {
                send_broadcast(home, Packet{Control{home.id, ControlKind::RediscoverNeighbors}});
            }
        }

        a.phase = SmartAgentState::Phase::Idle;
        a.token++;
        dispatch_next_visit(home);
    }

    void handle(VisitTimeoutEv& ev) {
        NodeState& home = nodes_[ev.home];
        if (!home.alive || !home.agent) return;
        SmartAgentState& a = *home.agent;
        if (a.phase != SmartAgentState::Phase::Visiting || a.token != ev.token) return;
        trace_.line(now(), "AGENT_TIMEOUT home=%u neighbor=%u attempt=%d", home.id, a.visiting,
                    a.attempt);
        if (a.attempt >= 3) {
            home.matrix.mark_invalid(a.visiting);
            flag_aggressor(home, a.visiting, "timeout");
            a.phase = SmartAgentState::Phase::Idle;
            a.token++;
            dispatch_next_visit(home);
            return;
        }
        const SimTime backoff = home.rng.uniform_time(
            SimTime::from_seconds(cfg_.agent.retry_backoff_min_s),
            SimTime::from_seconds(cfg_.agent.retry_backoff_max_s));
        queue_.schedule(now() + backoff, EventKind::MigrationTimeout,
                        RetryDispatchEv{home.id, a.token});
    }

    void handle(RetryDispatchEv& ev) {
        NodeState& home = nodes_[ev.home];
        if (!home.alive || !home.agent) return;
        SmartAgentState& a = *home.agent;
        if (a.phase != SmartAgentState::Phase::Visiting || a.token != ev.token) return;
        const NodeId n = a.visiting;
        if (!nodes_[n].alive || !radio_reaches(home, nodes_[n])) {
            trace_.line(now(), "VISIT_ABANDON home=%u neighbor=%u", home.id, n);
            a.phase = SmartAgentState::Phase::Idle;
            a.token++;
            dispatch_next_visit(home);
            return;
        }
        a.attempt++;
        a.token++;
        send_agent_visit(home, n);
        queue_.schedule(now() + SimTime::from_seconds(cfg_.agent.migration_timeout_s),
                        EventKind::MigrationTimeout, VisitTimeoutEv{home.id, a.token});
    }

    void finish_cycle(NodeState& h) {
        if (!h.agent) return;
        Confidence conf;
        conf.src = h.id;
        conf.trusted.push_back(ConfidenceEntry{h.id, true, true});
        for (const auto& [id, entry] : h.matrix.entries()) {
            if (entry.valid) conf.trusted.push_back(ConfidenceEntry{id, true, entry.agent});
        }
        if (h.adversary && h.adversary->false_confidence) {
            for (const auto& [id, entry] : h.matrix.entries()) {
                if (!entry.valid && nodes_[id].adversary) {
                    conf.trusted.push_back(ConfidenceEntry{id, true, false});
                }
            }
        }
        trace_.line(now(), "CYCLE_END home=%u trusted=%zu", h.id, conf.trusted.size());
        send_broadcast(h, Packet{std::move(conf)});
        schedule_next_cycle(h);
    }

    void handle_confidence(NodeState& to, const Confidence& c) {
        if (to.quarantined.contains(c.src)) return;
        if (cfg_.defense_enabled && !to.matrix.is_valid(c.src)) {
            to.untrusted_confidence_drops++;
            trace_.line(now(), "DROP node=%u from=%u type=CONFIDENCE reason=untrusted_source",
                        to.id, c.src);
            return;
        }
        to.matrix.apply_confidence(to.id, c);
    }

    void handle(FakeAgentEv& ev) {
        NodeState& attacker = nodes_[ev.attacker];
        if (attacker.alive && attacker.adversary && attacker.adversary->injects_fake_agents) {
            std::vector<NodeId> targets;
            for (const NodeState& n : nodes_) {
                if (n.id != attacker.id && n.alive && radio_reaches(attacker, n)) {
                    targets.push_back(n.id);
                }
            }
            if (!targets.empty()) {
                const NodeId target = targets[attacker.rng.below(targets.size())];
                AgentPacket fake =
                    make_fake_agent_packet(attacker.id, target, cfg_.codec, attacker.rng);
                trace_.line(now(), "FAKE_AGENT from=%u to=%u", attacker.id, target);
                send_unicast(attacker, target, Packet{std::move(fake)},
                             AgentTransfer{false, attacker.id, AgentTransfer::Purpose::Visit});
            }
            queue_.schedule(now() + SimTime::from_seconds(
                                        1.0 / attacker.adversary->fake_agent_rate_pps),
                            EventKind::TrafficTick, FakeAgentEv{attacker.id});
        }
    }

    // --- energy, death, handoff ---

    void node_dies(NodeState& n) {
        if (death_processed_.contains(n.id)) return;
        death_processed_.insert(n.id);
        trace_.line(now(), "DEATH node=%u remaining=%.6f", n.id, n.energy.remaining());
        if (n.agent) {
            handoff_agent(n);
            n.agent.reset();
        }
        // Dying gasp: neighbors learn the node is gone.
        for (NodeState& dest : nodes_) {
            if (dest.id == n.id || !dest.alive) continue;
            if (!radio_reaches(n, dest)) continue;
            queue_.schedule(now() + cfg_.radio.per_hop_delay, EventKind::PacketDelivery,
                            DeliveryEvPayload{n.id, dest.id, Packet{Death{n.id}}, std::nullopt});
        }
        n.alive = false;
        n.matrix = NeighborMatrix{};
        n.routes.clear();
        n.pending.clear();
        n.hosting.reset();
    }

    void handoff_agent(NodeState& dying) {
        // Lowest-id reliable neighbor without an agent takes over.
        for (const auto& [id, entry] : dying.matrix.entries()) {
            if (!entry.valid || entry.agent) continue;
            if (!nodes_[id].alive || !radio_reaches(dying, nodes_[id])) continue;
            trace_.line(now(), "HANDOFF from=%u to=%u", dying.id, id);
            AgentPacket pkt = build_agent_packet(dying, id, dying.agent->secrets, 0);
            queue_.schedule(now() + cfg_.radio.per_hop_delay, EventKind::PacketDelivery,
                            DeliveryEvPayload{dying.id, id, Packet{std::move(pkt)},
                                              AgentTransfer{true, dying.id,
                                                            AgentTransfer::Purpose::Handoff}});
            return;
        }
        trace_.line(now(), "AGENT_LOST home=%u", dying.id);
    }

    void handle_agent_handoff(NodeState& to, const AgentTransfer& transfer) {
        if (to.agent) return; // already an agent node; transferred copy is dropped
        install_agent(to);
        trace_.line(now(), "AGENT_INSTALLED node=%u from=%u", to.id, transfer.agent_home);
        schedule_next_cycle(to);
    }

    void handle_death_packet(NodeState& to, const Death& d) {
        to.matrix.erase(d.src);
        for (auto it = to.routes.begin(); it != to.routes.end();) {
            if (it->first == d.src || it->second.next_hop == d.src) {
                it = to.routes.erase(it);
            } else {
                ++it;
            }
        }
        to.obs.erase(d.src);
    }

    void handle_control(NodeState& to, const Control& c) {
        if (c.kind == ControlKind::RediscoverNeighbors && to.alive) {
            broadcast_hello(to);
        }
    }

    // --- detection ---

    void flag_aggressor(NodeState& by, NodeId subject, const char* reason) {
        by.flagged.insert(subject);
        if (by.adversary) return; // attacker-hosted agents do not report
        trace_.line(now(), "FLAG by=%u subject=%u reason=%s", by.id, subject, reason);
        record_detection(subject, by.id, reason);
    }

    void record_detection(NodeId subject, NodeId by, const char* reason) {
        detections_.try_emplace(subject, DetectionRecord{now(), by, reason});
    }

    /// Periodic rule evaluation at agent nodes. Observation counters are
    /// cumulative (monotone within the run); the window sets the cadence.
    void detector_sweep(NodeState& n) {
        if (now() - n.window_start < cfg_.detector.window) return;
        if (n.agent && !n.adversary) {
            for (const auto& [subject, counters] : n.obs) {
                if (n.quarantined.contains(subject) || subject == n.id) continue;
                const Suspicion s = evaluate_rules(subject, counters, cfg_.detector);
                if (s.level == SuspicionLevel::Clear) continue;
                trace_.line(now(), "RULES node=%u subject=%u tags=%s level=%s", n.id, subject,
                            rule_tags(s).c_str(), suspicion_level_name(s.level));
                if (s.level == SuspicionLevel::Confirmed) {
                    originate_warning(n, subject, "r4");
                } else if (counters.rrep_sent >= 1 && !has_open_round(n, subject)) {
                    open_judgement(n, subject, counters);
                }
            }
        }
        n.window_start = now();
    }

    bool has_open_round(const NodeState& n, NodeId subject) const {
        for (const auto& [rid, round] : n.judgements) {
            if (round.subject == subject) return true;
        }
        return false;
    }

    void open_judgement(NodeState& n, NodeId subject, const BehaviorCounters& own) {
        const std::uint32_t round_id = n.next_round_id++;
        JudgementRound round;
        round.subject = subject;
        round.opened = now();
        round.own_snapshot = own;
        n.judgements[round_id] = round;
        comment_requests_++;
        trace_.line(now(), "CREQ node=%u subject=%u round=%u", n.id, subject, round_id);
        send_broadcast(n, Packet{CommentRequest{n.id, subject, round_id}});
    }

    void handle_comment_request(NodeState& to, const CommentRequest& cr) {
        if (cr.subject == to.id) return;
        if (cfg_.defense_enabled && !to.matrix.is_valid(cr.src)) return;
        CommentReply reply;
        reply.src = to.id;
        reply.subject = cr.subject;
        reply.round_id = cr.round_id;
        auto it = to.obs.find(cr.subject);
        if (it != to.obs.end()) reply.counters = it->second;
        send_unicast(to, cr.src, Packet{std::move(reply)});
    }

    void handle_comment_reply(NodeState& to, const CommentReply& reply) {
        auto it = to.judgements.find(reply.round_id);
        if (it == to.judgements.end()) return;
        if (!it->second.responders.insert(reply.src).second) return;
        it->second.replies.push_back(reply);
    }

    void close_due_judgements(NodeState& n) {
        const SimTime close_after = SimTime::from_seconds(cfg_.housekeeping_period_s);
        for (auto it = n.judgements.begin(); it != n.judgements.end();) {
            JudgementRound& round = it->second;
            if (now() - round.opened < close_after) {
                ++it;
                continue;
            }
            std::vector<BehaviorCounters> reply_counters;
            reply_counters.reserve(round.replies.size());
            for (const CommentReply& r : round.replies) reply_counters.push_back(r.counters);
            const JudgementOutcome out =
                decide_judgement(round.subject, round.own_snapshot, reply_counters, cfg_.detector);
            if (out.defer) {
                trace_.line(now(), "JUDGE node=%u subject=%u responders=0 verdict=defer", n.id,
                            round.subject);
                it = n.judgements.erase(it);
                continue;
            }
            trace_.line(now(), "JUDGE node=%u subject=%u responders=%zu agree=%zu verdict=%d",
                        n.id, round.subject, out.responders, out.agreeing, out.verdict ? 1 : 0);
            if (out.verdict) originate_warning(n, round.subject, "judgement");
            it = n.judgements.erase(it);
        }
    }

    void originate_warning(NodeState& by, NodeId subject, const char* reason) {
        if (by.quarantined.contains(subject)) return;
        trace_.line(now(), "WARN_ORIGIN by=%u subject=%u reason=%s", by.id, subject, reason);
        record_detection(subject, by.id, reason);
        apply_quarantine(by, subject);
        send_broadcast(by, Packet{Warning{by.id, subject}});
    }

    void apply_quarantine(NodeState& n, NodeId subject) {
        n.quarantined.insert(subject);
        n.matrix.erase(subject);
        for (auto it = n.routes.begin(); it != n.routes.end();) {
            if (it->first == subject || it->second.next_hop == subject) {
                it = n.routes.erase(it);
            } else {
                ++it;
            }
        }
        trace_.line(now(), "WARN_APPLY node=%u subject=%u", n.id, subject);
    }

    void handle_warning(NodeState& to, const Warning& w) {
        if (to.quarantined.contains(w.subject)) return; // flood dedupe
        if (cfg_.routing.warning_auth && cfg_.defense_enabled) {
            if (to.quarantined.contains(w.src)) return;
            const auto* entry = to.matrix.find(w.src);
            if (entry && !(entry->valid && entry->agent)) return; // known non-agent: spoofed
        }
        apply_quarantine(to, w.subject);
        send_broadcast(to, Packet{Warning{w.src, w.subject}}); // relay preserves originator
    }

    // --- members ---

    ScenarioConfig cfg_;
    TraceWriter trace_;
    const crypto::CyclicGroup& group_;
    crypto::TrustedAuthority authority_;
    crypto::NodeKeys network_keys_;
    crypto::ChainMaterial chain_;
    EventQueue<EventPayload> queue_;
    std::vector<NodeState> nodes_;
    std::vector<FlowState> flows_;
    std::set<NodeId> ground_truth_;
    std::map<NodeId, DetectionRecord> detections_;
    std::set<NodeId> death_processed_;
    std::uint64_t sent_total_ = 0;
    std::uint64_t delivered_total_ = 0;
    std::uint64_t comment_requests_ = 0;
    bool ended_ = false;
};

} // namespace sauav
