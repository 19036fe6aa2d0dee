#pragma once

#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "sauav/metrics.hpp"
#include "sauav/scenario.hpp"
#include "sauav/simulation.hpp"

namespace sauav {

inline MetricsReport run_scenario(const ScenarioConfig& cfg, std::ostream* trace = nullptr) {
    Simulation sim(cfg, trace);
    return sim.run();
}

/// Repeated runs of one scenario over consecutive seeds.
inline std::vector<MetricsReport> run_repeats(const ScenarioConfig& base, std::uint32_t repeats,
                                              unsigned jobs = 1) {
    std::vector<MetricsReport> out(repeats);
    if (jobs <= 1 || repeats <= 1) {
        for (std::uint32_t i = 0; i < repeats; ++i) {
            ScenarioConfig cfg = base;
            cfg.seed = base.seed + i;
            out[i] = run_scenario(cfg);
        }
        return out;
    }
    std::vector<std::future<MetricsReport>> futures;
    futures.reserve(repeats);
    for (std::uint32_t i = 0; i < repeats; ++i) {
        ScenarioConfig cfg = base;
        cfg.seed = base.seed + i;
        futures.push_back(std::async(std::launch::async, [cfg]() { return run_scenario(cfg); }));
    }
    for (std::uint32_t i = 0; i < repeats; ++i) out[i] = futures[i].get();
    return out;
}

struct Stat {
    std::optional<double> mean;
    double stddev = 0.0;
};

inline Stat aggregate(const std::vector<std::optional<double>>& samples) {
    Stat s;
    std::vector<double> xs;
    for (const auto& v : samples) {
        if (v) xs.push_back(*v);
    }
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    s.mean = mean;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

enum class SweepAxis { NUavs, MaliciousFraction };

inline const char* sweep_axis_name(SweepAxis a) {
    return a == SweepAxis::NUavs ? "n_uavs" : "malicious_fraction";
}

struct SweepRow {
    double value = 0.0;
    Stat dr, fp, fn, pdr, re;
    std::uint32_t repeats = 0;
};

/// Mean +/- sample stddev per axis value over `repeats` seeds. Rows come back
/// sorted by axis value regardless of execution order.
inline std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis,
                                   std::vector<double> values, std::uint32_t repeats,
                                   unsigned jobs = 1) {
    if (values.empty()) throw ConfigError("values", "sweep needs at least one axis value");
    std::sort(values.begin(), values.end());
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        ScenarioConfig cfg = base;
        if (axis == SweepAxis::NUavs) {
            cfg.n_uavs = static_cast<std::uint32_t>(v);
        } else {
            cfg.malicious_fraction = v;
        }
        cfg.validate();
        const auto reports = run_repeats(cfg, repeats, jobs);
        SweepRow row;
        row.value = v;
        row.repeats = repeats;
        std::vector<std::optional<double>> dr, fp, fn, pdr, re;
        for (const MetricsReport& r : reports) {
            dr.push_back(r.dr);
            fp.push_back(r.fp_rate);
            fn.push_back(r.fn_rate);
            pdr.push_back(r.pdr);
            re.push_back(r.re);
        }
        row.dr = aggregate(dr);
        row.fp = aggregate(fp);
        row.fn = aggregate(fn);
        row.pdr = aggregate(pdr);
        row.re = aggregate(re);
        rows.push_back(row);
    }
    return rows;
}

} // namespace sauav
