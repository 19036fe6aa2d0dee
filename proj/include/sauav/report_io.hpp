#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "sauav/metrics.hpp"
#include "sauav/scenario.hpp"
#include "sauav/sweep.hpp"

namespace sauav {

/// Column orders here are frozen and documented in OUTPUT.md.

inline void write_report_csv(std::ostream& out, const ScenarioConfig& cfg,
                             const MetricsReport& r) {
    out << "seed,n_uavs,malicious_fraction,defense,pdr,dr,fp_rate,fn_rate,re,"
           "tp,fp,fn,tn,sent,received,comment_requests,listen_violations\n";
    out << cfg.seed << ',' << cfg.n_uavs << ',' << format_double(cfg.malicious_fraction) << ','
        << (cfg.defense_enabled ? 1 : 0) << ',' << format_double(r.pdr) << ','
        << format_optional(r.dr) << ',' << format_optional(r.fp_rate) << ','
        << format_optional(r.fn_rate) << ',' << format_double(r.re) << ',' << r.confusion.tp
        << ',' << r.confusion.fp << ',' << r.confusion.fn << ',' << r.confusion.tn << ','
        << r.sent_total << ',' << r.received_total << ',' << r.comment_requests << ','
        << r.listen_violations << '\n';
}

inline nlohmann::json report_to_json(const ScenarioConfig& cfg, const MetricsReport& r) {
    nlohmann::json j;
    j["config"] = {{"seed", cfg.seed},
                   {"n_uavs", cfg.n_uavs},
                   {"malicious_fraction", cfg.malicious_fraction},
                   {"defense", cfg.defense_enabled},
                   {"arena_m", cfg.arena_m},
                   {"range_m", cfg.radio.range_m},
                   {"sim_time_s", cfg.sim_time_s}};
    j["pdr"] = r.pdr;
    j["dr"] = r.dr ? nlohmann::json(*r.dr) : nlohmann::json(nullptr);
    j["fp_rate"] = r.fp_rate ? nlohmann::json(*r.fp_rate) : nlohmann::json(nullptr);
    j["fn_rate"] = r.fn_rate ? nlohmann::json(*r.fn_rate) : nlohmann::json(nullptr);
    j["re"] = r.re;
    j["confusion"] = {{"tp", r.confusion.tp},
                      {"fp", r.confusion.fp},
                      {"fn", r.confusion.fn},
                      {"tn", r.confusion.tn}};
    j["sent"] = r.sent_total;
    j["received"] = r.received_total;
    j["comment_requests"] = r.comment_requests;
    j["listen_violations"] = r.listen_violations;
    j["detected"] = r.detected;
    j["ground_truth_malicious"] = r.ground_truth_malicious;
    return j;
}

inline std::string stat_csv(const Stat& s) {
    return format_optional(s.mean) + "," + format_double(s.stddev);
}

inline void write_sweep_csv(std::ostream& out, SweepAxis axis,
                            const std::vector<SweepRow>& rows) {
    out << sweep_axis_name(axis)
        << ",dr,dr_std,fp,fp_std,fn,fn_std,pdr,pdr_std,re,re_std,repeats\n";
    for (const SweepRow& r : rows) {
        out << format_double(r.value) << ',' << stat_csv(r.dr) << ',' << stat_csv(r.fp) << ','
            << stat_csv(r.fn) << ',' << stat_csv(r.pdr) << ',' << stat_csv(r.re) << ','
            << r.repeats << '\n';
    }
}

/// gnuplot-friendly variant: whitespace-separated, "nan" for undefined.
inline void write_sweep_dat(std::ostream& out, SweepAxis axis,
                            const std::vector<SweepRow>& rows) {
    out << "# " << sweep_axis_name(axis)
        << " dr dr_std fp fp_std fn fn_std pdr pdr_std re re_std\n";
    auto v = [](const Stat& s) {
        return (s.mean ? format_double(*s.mean) : std::string("nan")) + " " +
               format_double(s.stddev);
    };
    for (const SweepRow& r : rows) {
        out << format_double(r.value) << ' ' << v(r.dr) << ' ' << v(r.fp) << ' ' << v(r.fn) << ' '
            << v(r.pdr) << ' ' << v(r.re) << '\n';
    }
}

} // namespace sauav
