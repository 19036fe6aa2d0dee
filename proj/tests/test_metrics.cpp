#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "sauav/metrics.hpp"
#include "sauav/rng.hpp"
#include "sauav/scenario.hpp"
#include "sauav/toml.hpp"

using namespace sauav;

TEST_CASE("pdr of a single run is its delivery ratio") {
    std::vector<RunTotals> runs{{82, 100}};
    REQUIRE(compute_pdr(runs) == Catch::Approx(82.0));
}

TEST_CASE("pdr over runs is the mean of per-run ratios") {
    std::vector<RunTotals> runs{{50, 100}, {100, 100}};
    REQUIRE(compute_pdr(runs) == Catch::Approx(75.0));
}

TEST_CASE("pdr rejects empty input and zero denominators") {
    REQUIRE_THROWS_AS(compute_pdr({}), EmptyInputError);
    std::vector<RunTotals> bad{{0, 0}};
    REQUIRE_THROWS_AS(compute_pdr(bad), EmptyInputError);
}

TEST_CASE("rate formulas") {
    const ConfusionMatrix m{9, 2, 1, 88};
    const Rates r = compute_rates(m);
    REQUIRE(*r.dr == Catch::Approx(90.0));
    REQUIRE(*r.fp_rate == Catch::Approx(100.0 * 2.0 / 90.0));
    REQUIRE(*r.fn_rate == Catch::Approx(10.0));
}

TEST_CASE("zero malicious ground truth leaves dr undefined but fp well-defined") {
    const ConfusionMatrix m{0, 3, 0, 97};
    const Rates r = compute_rates(m);
    REQUIRE_FALSE(r.dr.has_value());
    REQUIRE_FALSE(r.fn_rate.has_value());
    REQUIRE(*r.fp_rate == Catch::Approx(3.0));
    REQUIRE(format_optional(r.dr) == "na");
}

TEST_CASE("dr and fn are exact complements whenever defined") {
    Rng rng(55);
    for (int i = 0; i < 500; ++i) {
        ConfusionMatrix m;
        m.tp = static_cast<std::uint32_t>(rng.below(50));
        m.fn = static_cast<std::uint32_t>(rng.below(50));
        m.fp = static_cast<std::uint32_t>(rng.below(50));
        m.tn = static_cast<std::uint32_t>(rng.below(50));
        const Rates r = compute_rates(m);
        if (r.dr) {
            REQUIRE(*r.dr + *r.fn_rate == Catch::Approx(100.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("residual energy is the mean remaining fraction") {
    std::vector<NodeEnergy> untouched{{100.0, 100.0}, {50.0, 50.0}};
    REQUIRE(compute_re(untouched) == Catch::Approx(100.0));
    std::vector<NodeEnergy> mixed{{100.0, 100.0}, {50.0, 100.0}};
    REQUIRE(compute_re(mixed) == Catch::Approx(75.0));
}

TEST_CASE("toml subset parses sections, scalars, arrays, comments") {
    const auto doc = toml::parse(R"(
# scenario
n_uavs = 100
malicious_fraction = 0.3   # thirty percent
defense = true
name = "desk run"

[radio]
range = 250.0
costs = [1, 2.5, 3]
)");
    REQUIRE(doc.at("n_uavs").as_int() == 100);
    REQUIRE(doc.at("malicious_fraction").as_double() == Catch::Approx(0.3));
    REQUIRE(doc.at("defense").as_bool());
    REQUIRE(doc.at("name").as_string() == "desk run");
    REQUIRE(doc.at("radio.range").as_double() == Catch::Approx(250.0));
    const auto& arr = doc.at("radio.costs").as_array();
    REQUIRE(arr.size() == 3);
    REQUIRE(arr[0].as_int() == 1);
    REQUIRE(arr[1].as_double() == Catch::Approx(2.5));
    REQUIRE(doc.get_double("missing", 7.0) == 7.0);
}

TEST_CASE("toml errors carry line numbers") {
    REQUIRE_THROWS_WITH(toml::parse("a ="), Catch::Matchers::ContainsSubstring("line 1"));
    REQUIRE_THROWS_WITH(toml::parse("\n[broken"), Catch::Matchers::ContainsSubstring("line 2"));
    REQUIRE_THROWS_WITH(toml::parse("x = \"unterminated"),
                        Catch::Matchers::ContainsSubstring("line 1"));
    REQUIRE_THROWS_AS(toml::parse("x = zzz"), toml::ParseError);
}

TEST_CASE("scenario config loads from toml with defaults") {
    const auto doc = toml::parse(R"(
n_uavs = 60
malicious_fraction = 0.2
sim_time = 50
seed = 9

[radio]
range = 200.0

[agent]
fraction = 0.25

[adversary]
blackhole = 1.0
grayhole = 1.0
sinkhole = 1.0
)");
    const ScenarioConfig cfg = scenario_from_toml(doc);
    REQUIRE(cfg.n_uavs == 60);
    REQUIRE(cfg.malicious_fraction == Catch::Approx(0.2));
    REQUIRE(cfg.seed == 9);
    REQUIRE(cfg.radio.range_m == Catch::Approx(200.0));
    REQUIRE(cfg.agent.fraction == Catch::Approx(0.25));
    REQUIRE(cfg.mix.grayhole == Catch::Approx(1.0));
    REQUIRE(cfg.traffic.payload_bytes == 512); // default
    REQUIRE(cfg.detector.n_min == 10);         // default
}

TEST_CASE("scenario validation reports the offending field") {
    ScenarioConfig cfg;
    cfg.malicious_fraction = 1.5;
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.field_name == "malicious_fraction");
    }

    ScenarioConfig gray;
    gray.malicious_fraction = 0.2;
    gray.mix = AdversaryMixConfig{};
    gray.mix.blackhole = 0.0;
    gray.mix.grayhole = 1.0;
    gray.mix.grayhole_drop_ratio = 0.0; // boundary: disallowed
    REQUIRE_THROWS_AS(gray.validate(), ConfigError);
    gray.mix.grayhole_drop_ratio = 1.0;
    REQUIRE_THROWS_AS(gray.validate(), ConfigError);
    gray.mix.grayhole_drop_ratio = 0.5;
    REQUIRE_NOTHROW(gray.validate());
}
