#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <vector>

#include "sauav/report_io.hpp"
#include "sauav/sweep.hpp"
#include "sauav/verify.hpp"
#include "sim_helpers.hpp"

using namespace sauav;
using namespace sauav::testing;

namespace {

// Eight-node wireless neighborhood: two agent nodes (0 and 7) and one
// malicious node (4). Adjacency at range 100:
//   0: {1,2,3,4}   1: {0,2,5,7}   7: {1,3,5}
std::vector<Position> eight_node_positions() {
    return {
        {200, 200}, // 0  agent
        {260, 275}, // 1
        {180, 285}, // 2
        {260, 125}, // 3
        {110, 170}, // 4  malicious
        {310, 260}, // 5
        {600, 600}, // 6  isolated
        {320, 200}, // 7  agent
    };
}

ScenarioConfig eight_node_scenario() {
    AdversaryProfile mal;
    mal.kind = AttackKind::Blackhole;
    auto cfg = static_scenario(eight_node_positions(), {0, 7}, {{4, mal}});
    cfg.sim_time_s = 12.0;
    return cfg;
}

struct RowBit {
    NodeId neighbor;
    bool valid;
    bool agent;
};

void expect_row(const Simulation& sim, NodeId node, const std::vector<RowBit>& row) {
    const auto& matrix = sim.node(node).matrix;
    REQUIRE(matrix.size() == row.size());
    for (const RowBit& r : row) {
        const NeighborEntry* e = matrix.find(r.neighbor);
        INFO("node " << node << " neighbor " << r.neighbor);
        REQUIRE(e != nullptr);
        REQUIRE(e->valid == r.valid);
        REQUIRE(e->agent == r.agent);
    }
}

} // namespace

TEST_CASE("eight-node replay: matrices pass through the three canonical states") {
    Simulation sim(eight_node_scenario(), nullptr);

    // After HELLO discovery, before any agent cycle: rows exist, all bits 0.
    sim.run_until(SimTime::from_seconds(1.5));
    expect_row(sim, 0, {{1, false, false}, {2, false, false}, {3, false, false},
                        {4, false, false}});
    expect_row(sim, 1, {{0, false, false}, {2, false, false}, {5, false, false},
                        {7, false, false}});
    expect_row(sim, 7, {{1, false, false}, {3, false, false}, {5, false, false}});

    // Mid-migration: node 1 has hosted both agents but no confidence packet
    // has arrived yet.
    sim.run_until(SimTime::from_micros(2'045'000));
    expect_row(sim, 1, {{0, true, true}, {2, false, false}, {5, false, false}, {7, true, true}});

    // After both agents completed a full cycle: direct visit outcomes.
    sim.run_until(SimTime::from_seconds(2.2));
    expect_row(sim, 0, {{1, true, false}, {2, true, false}, {3, true, false},
                        {4, false, false}});
    expect_row(sim, 7, {{1, true, false}, {3, true, false}, {5, true, false}});

    // And the confidence packets taught node 1 about 2 and 5.
    expect_row(sim, 1, {{0, true, true}, {2, true, false}, {5, true, false}, {7, true, true}});

    // The malicious node was spotted by the handshake.
    REQUIRE(sim.detected_set() == std::set<NodeId>{4});
}

TEST_CASE("after one cycle plus confidence, all honest in-range pairs are valid") {
    Simulation sim(eight_node_scenario(), nullptr);
    sim.run_until(SimTime::from_seconds(3.0));
    const auto positions = eight_node_positions();
    for (NodeId a = 0; a < 8; ++a) {
        if (a == 4 || a == 6) continue; // malicious / isolated
        for (NodeId b = 0; b < 8; ++b) {
            if (b == a || b == 4 || b == 6) continue;
            if (distance(positions[a], positions[b]) > 100.0) continue;
            INFO("pair " << a << " -> " << b);
            REQUIRE(sim.node(a).matrix.is_valid(b));
        }
        REQUIRE_FALSE(sim.node(a).matrix.is_valid(4));
    }
}

TEST_CASE("same config and seed give byte-identical traces and reports") {
    ScenarioConfig cfg;
    cfg.n_uavs = 40;
    cfg.arena_m = 600.0;
    cfg.radio.range_m = 150.0;
    cfg.malicious_fraction = 0.1;
    cfg.mix.blackhole = 1.0;
    cfg.mix.grayhole = 1.0;
    cfg.mix.sinkhole = 1.0;
    cfg.uav_speed_mps = 15.0;
    cfg.sim_time_s = 40.0;
    cfg.traffic.flows = 6;
    cfg.traffic.rate_pps = 2.0;
    cfg.traffic.start_s = 10.0;
    cfg.seed = 12345;

    std::ostringstream t1, t2;
    Simulation s1(cfg, &t1);
    const MetricsReport r1 = s1.run();
    Simulation s2(cfg, &t2);
    const MetricsReport r2 = s2.run();

    REQUIRE(t1.str() == t2.str());
    REQUIRE_FALSE(t1.str().empty());

    std::ostringstream c1, c2;
    write_report_csv(c1, cfg, r1);
    write_report_csv(c2, cfg, r2);
    REQUIRE(c1.str() == c2.str());

    // a different seed perturbs the trace
    cfg.seed = 54321;
    std::ostringstream t3;
    Simulation s3(cfg, &t3);
    s3.run();
    REQUIRE(t1.str() != t3.str());
}

TEST_CASE("trace verification reproduces the report and finds no violations") {
    ScenarioConfig cfg;
    cfg.n_uavs = 30;
    cfg.arena_m = 500.0;
    cfg.radio.range_m = 150.0;
    cfg.malicious_fraction = 0.2;
    cfg.mix.blackhole = 1.0;
    cfg.mix.sinkhole = 1.0;
    cfg.uav_speed_mps = 10.0;
    cfg.sim_time_s = 30.0;
    cfg.traffic.flows = 5;
    cfg.traffic.rate_pps = 4.0;
    cfg.traffic.start_s = 8.0;
    cfg.seed = 99;

    std::ostringstream trace;
    Simulation sim(cfg, &trace);
    const MetricsReport r = sim.run();

    std::istringstream in(trace.str());
    const VerifyResult v = verify_trace_stream(in);
    const std::string first_problem = v.problems.empty() ? "no problems" : v.problems.front();
    INFO(first_problem);
    REQUIRE(v.ok);
    REQUIRE(v.report_seen);
    REQUIRE(v.matches_report);
    REQUIRE(v.sent == r.sent_total);
    REQUIRE(v.delivered == r.received_total);
    REQUIRE(v.pdr == format_double(r.pdr));
    REQUIRE(v.dr == format_optional(r.dr));
}

TEST_CASE("judgement decision: unanimous zero-forwarding conviction") {
    DetectorConfig cfg;
    BehaviorCounters own;
    own.rrep_sent = 1;
    std::vector<BehaviorCounters> replies(4);
    for (auto& r : replies) {
        r.data_received = 20;
        r.data_forwarded = 0;
    }
    const JudgementOutcome out = decide_judgement(5, own, replies, cfg);
    REQUIRE_FALSE(out.defer);
    REQUIRE(out.responders == 4);
    REQUIRE(out.agreeing == 4);
    REQUIRE(out.verdict); // merged counters confirm via R2+R3
    REQUIRE(out.merged_level == SuspicionLevel::Confirmed);
}

TEST_CASE("judgement decision: a single suspicious voice among five is not enough") {
    DetectorConfig cfg;
    BehaviorCounters own;
    own.rrep_sent = 1;
    own.max_seq_min_hops_flag = true; // initiator suspects
    std::vector<BehaviorCounters> replies(5);
    replies[0].data_received = 30; // one agreeing responder
    replies[0].data_forwarded = 0;
    for (int i = 1; i < 5; ++i) {
        replies[i].data_received = 30; // healthy relays observed by the rest
        replies[i].data_forwarded = 30;
        replies[i].data_sent = 2;
    }
    const JudgementOutcome out = decide_judgement(5, own, replies, cfg);
    REQUIRE(out.responders == 5);
    REQUIRE(out.agreeing == 1);
    REQUIRE_FALSE(out.verdict); // 1/5 < quorum 0.5 and merged stays suspect at worst
}

TEST_CASE("judgement decision: no responders defers") {
    DetectorConfig cfg;
    BehaviorCounters own;
    own.rrep_sent = 2;
    const JudgementOutcome out = decide_judgement(5, own, {}, cfg);
    REQUIRE(out.defer);
    REQUIRE_FALSE(out.verdict);
}

TEST_CASE("sweep aggregates mean and stddev, sorted by axis value") {
    ScenarioConfig base;
    base.n_uavs = 20;
    base.arena_m = 400.0;
    base.radio.range_m = 150.0;
    base.sim_time_s = 15.0;
    base.traffic.flows = 3;
    base.traffic.start_s = 5.0;
    base.uav_speed_mps = 5.0;
    base.seed = 3;

    const auto rows = sweep(base, SweepAxis::NUavs, {30.0, 20.0}, 2, 2);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].value == 20.0); // sorted
    REQUIRE(rows[1].value == 30.0);
    for (const auto& row : rows) {
        REQUIRE(row.repeats == 2);
        REQUIRE(row.pdr.mean.has_value());
        REQUIRE_FALSE(row.dr.mean.has_value()); // zero attackers: dr undefined
    }

    const auto single = sweep(base, SweepAxis::MaliciousFraction, {0.0}, 1, 1);
    REQUIRE(single[0].pdr.stddev == 0.0); // one repeat: no spread
}

TEST_CASE("residual energy starts full and decays with traffic") {
    auto cfg = static_scenario({{100, 100}, {160, 100}}, {}, {}, {{0, 1}});
    cfg.defense_enabled = false;
    cfg.traffic.start_s = 1.0;
    cfg.traffic.rate_pps = 20.0;
    cfg.sim_time_s = 10.0;
    Simulation sim(cfg, nullptr);
    const MetricsReport r = sim.run();
    REQUIRE(r.re < 100.0);
    REQUIRE(r.re > 90.0);
    REQUIRE(r.pdr == Catch::Approx(100.0));
}
