#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sauav/metrics.hpp"

namespace sauav {

/// Independent post-processor over a trace log: recomputes the headline
/// metrics from raw records (no shared code with the in-run accounting) and
/// audits protocol-order properties. Used by `sauav verify`.

struct TraceRecord {
    std::int64_t t_us = 0;
    std::string type;
    std::map<std::string, std::string> kv;

    std::int64_t i(const std::string& key) const { return std::stoll(kv.at(key)); }
    bool has(const std::string& key) const { return kv.contains(key); }
    const std::string& s(const std::string& key) const { return kv.at(key); }
};

inline std::optional<TraceRecord> parse_trace_line(const std::string& line) {
    std::istringstream in(line);
    TraceRecord rec;
    if (!(in >> rec.t_us >> rec.type)) return std::nullopt;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        rec.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return rec;
}

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> problems;

    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::string pdr;     // formatted like the REPORT line for exact comparison
    std::string dr;
    std::string fp_rate;
    std::string fn_rate;
    std::uint32_t tp = 0, fp = 0, fn = 0, tn = 0;
    bool report_seen = false;
    bool matches_report = true;

    void problem(std::string msg) {
        ok = false;
        problems.push_back(std::move(msg));
    }
};

inline VerifyResult verify_trace_stream(std::istream& in) {
    VerifyResult res;

    std::uint32_t n_nodes = 0;
    std::set<std::uint32_t> ground_truth;
    std::set<std::uint32_t> detected;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    // per (agent,host): last handshake progress for step-order auditing
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> hs_step;
    std::map<std::pair<std::uint32_t, std::uint32_t>, bool> hs_step_ok;
    // per node: quarantine knowledge (subject -> apply time)
    std::map<std::uint32_t, std::map<std::uint32_t, std::int64_t>> applied;
    std::map<std::string, std::string> report_kv;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parsed = parse_trace_line(line);
        if (!parsed) continue;
        const TraceRecord& r = *parsed;

        if (r.type == "CONFIG") {
            n_nodes = static_cast<std::uint32_t>(r.i("n"));
        } else if (r.type == "GT") {
            ground_truth.insert(static_cast<std::uint32_t>(r.i("node")));
        } else if (r.type == "SEND") {
            ++sent;
        } else if (r.type == "DELIVER") {
            ++delivered;
        } else if (r.type == "FLAG" || r.type == "WARN_ORIGIN") {
            detected.insert(static_cast<std::uint32_t>(r.i("subject")));
        } else if (r.type == "WARN_APPLY") {
            applied[static_cast<std::uint32_t>(r.i("node"))]
                   [static_cast<std::uint32_t>(r.i("subject"))] = r.t_us;
        } else if (r.type == "ROUTE") {
            const auto node = static_cast<std::uint32_t>(r.i("node"));
            const auto next = static_cast<std::uint32_t>(r.i("next"));
            auto it = applied.find(node);
            if (it != applied.end()) {
                auto q = it->second.find(next);
                if (q != it->second.end() && r.t_us > q->second) {
                    res.problem("route through quarantined node: " + line);
                }
            }
        } else if (r.type == "FWD") {
            const auto node = static_cast<std::uint32_t>(r.i("node"));
            const auto to = static_cast<std::uint32_t>(r.i("to"));
            auto it = applied.find(node);
            if (it != applied.end()) {
                auto q = it->second.find(to);
                if (q != it->second.end() && r.t_us > q->second) {
                    res.problem("forward to quarantined node: " + line);
                }
            }
        } else if (r.type == "HS") {
            const auto key = std::make_pair(static_cast<std::uint32_t>(r.i("agent")),
                                            static_cast<std::uint32_t>(r.i("host")));
            if (r.has("step")) {
                const int step = static_cast<int>(r.i("step"));
                const bool ok = !r.has("ok") || r.i("ok") == 1;
                if (step == 1) {
                    hs_step[key] = 1;
                } else {
                    if (hs_step[key] != step - 1) {
                        res.problem("handshake step out of order: " + line);
                    }
                    // A genuine code 3 (ok=1) may only follow a verified
                    // code 2; a fabricated answer (ok=0) is an attack, not a
                    // release.
                    if (step == 3 && ok && !hs_step_ok[key]) {
                        res.problem("code 3 released before code 2 verified: " + line);
                    }
                    hs_step[key] = step;
                }
                hs_step_ok[key] = ok;
            }
        } else if (r.type == "RELEASE") {
            const auto key = std::make_pair(static_cast<std::uint32_t>(r.i("agent")),
                                            static_cast<std::uint32_t>(r.i("host")));
            if (hs_step[key] != 3 || !hs_step_ok[key]) {
                res.problem("data code released before code 3 verified: " + line);
            }
        } else if (r.type == "REPORT") {
            res.report_seen = true;
            report_kv = r.kv;
        }
    }

    res.sent = sent;
    res.delivered = delivered;
    res.pdr = format_double(
        sent > 0 ? 100.0 * static_cast<double>(delivered) / static_cast<double>(sent) : 0.0);

    // Brute-force confusion matrix straight from the records.
    for (std::uint32_t n = 0; n < n_nodes; ++n) {
        const bool mal = ground_truth.contains(n);
        const bool det = detected.contains(n);
        if (mal && det) {
            res.tp++;
        } else if (!mal && det) {
            res.fp++;
        } else if (mal && !det) {
            res.fn++;
        } else {
            res.tn++;
        }
    }
    res.dr = res.tp + res.fn > 0
                 ? format_double(100.0 * res.tp / static_cast<double>(res.tp + res.fn))
                 : "na";
    res.fn_rate = res.tp + res.fn > 0
                      ? format_double(100.0 * res.fn / static_cast<double>(res.fn + res.tp))
                      : "na";
    res.fp_rate = res.fp + res.tn > 0
                      ? format_double(100.0 * res.fp / static_cast<double>(res.fp + res.tn))
                      : "na";

    if (res.report_seen) {
        auto expect = [&](const char* key, const std::string& mine) {
            auto it = report_kv.find(key);
            if (it == report_kv.end()) return;
            if (it->second != mine) {
                res.matches_report = false;
                res.problem(std::string("REPORT mismatch on ") + key + ": trace=" + it->second +
                            " recomputed=" + mine);
            }
        };
        expect("pdr", res.pdr);
        expect("dr", res.dr);
        expect("fp", res.fp_rate);
        expect("fn", res.fn_rate);
    }
    return res;
}

inline VerifyResult verify_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        VerifyResult r;
        r.problem("cannot open trace file: " + path);
        return r;
    }
    return verify_trace_stream(in);
}

} // namespace sauav
