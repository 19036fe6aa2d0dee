#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sauav/report_io.hpp"
#include "sauav/sauav.hpp"

namespace {

sauav::ScenarioConfig load_config(const std::string& path) {
    return sauav::scenario_from_file(path);
}

void apply_overrides(sauav::ScenarioConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<double>& range, const std::optional<std::string>& defense,
                     const std::optional<double>& speed) {
    if (seed) cfg.seed = *seed;
    if (range) cfg.radio.range_m = *range;
    if (speed) cfg.uav_speed_mps = *speed;
    if (defense) {
        if (*defense == "on") {
            cfg.defense_enabled = true;
        } else if (*defense == "off") {
            cfg.defense_enabled = false;
        } else {
            throw sauav::ConfigError("defense", "expected 'on' or 'off'");
        }
    }
    cfg.validate();
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<double>& range, const std::optional<std::string>& defense,
            const std::optional<double>& speed, bool as_json, const std::string& out_path,
            const std::string& trace_path) {
    sauav::ScenarioConfig cfg = load_config(config_path);
    apply_overrides(cfg, seed, range, defense, speed);

    std::ofstream trace_file;
    std::ostream* trace = nullptr;
    if (!trace_path.empty()) {
        trace_file.open(trace_path);
        if (!trace_file) {
            std::cerr << "error: cannot open trace output " << trace_path << "\n";
            return 1;
        }
        trace = &trace_file;
    }

    const sauav::MetricsReport report = sauav::run_scenario(cfg, trace);

    std::ostringstream body;
    if (as_json) {
        body << sauav::report_to_json(cfg, report).dump(2) << '\n';
    } else {
        sauav::write_report_csv(body, cfg, report);
    }
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot open output " << out_path << "\n";
            return 1;
        }
        out << body.str();
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<double>& values, std::uint32_t repeats, unsigned jobs,
              const std::string& out_prefix, const std::optional<std::string>& defense,
              const std::optional<std::uint64_t>& seed) {
    sauav::ScenarioConfig cfg = load_config(config_path);
    apply_overrides(cfg, seed, std::nullopt, defense, std::nullopt);

    sauav::SweepAxis axis;
    if (axis_name == "n_uavs") {
        axis = sauav::SweepAxis::NUavs;
    } else if (axis_name == "malicious_fraction") {
        axis = sauav::SweepAxis::MaliciousFraction;
    } else {
        std::cerr << "error: --axis must be n_uavs or malicious_fraction\n";
        return 1;
    }

    const auto rows = sauav::sweep(cfg, axis, values, repeats, jobs);

    if (out_prefix.empty()) {
        sauav::write_sweep_csv(std::cout, axis, rows);
    } else {
        std::ofstream csv(out_prefix + ".csv");
        std::ofstream dat(out_prefix + ".dat");
        if (!csv || !dat) {
            std::cerr << "error: cannot open sweep outputs with prefix " << out_prefix << "\n";
            return 1;
        }
        sauav::write_sweep_csv(csv, axis, rows);
        sauav::write_sweep_dat(dat, axis, rows);
        std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".dat\n";
    }
    return 0;
}

int cmd_verify(const std::string& trace_path, bool as_json) {
    const sauav::VerifyResult res = sauav::verify_trace_file(trace_path);
    if (as_json) {
        nlohmann::json j;
        j["ok"] = res.ok;
        j["sent"] = res.sent;
        j["delivered"] = res.delivered;
        j["pdr"] = res.pdr;
        j["dr"] = res.dr;
        j["fp_rate"] = res.fp_rate;
        j["fn_rate"] = res.fn_rate;
        j["confusion"] = {{"tp", res.tp}, {"fp", res.fp}, {"fn", res.fn}, {"tn", res.tn}};
        j["matches_report"] = res.matches_report;
        j["problems"] = res.problems;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "sent=" << res.sent << " delivered=" << res.delivered << " pdr=" << res.pdr
                  << " dr=" << res.dr << " fp=" << res.fp_rate << " fn=" << res.fn_rate << "\n";
        std::cout << "confusion tp=" << res.tp << " fp=" << res.fp << " fn=" << res.fn
                  << " tn=" << res.tn << "\n";
        for (const std::string& p : res.problems) std::cout << "problem: " << p << "\n";
        std::cout << (res.ok ? "trace OK" : "trace has problems") << "\n";
    }
    return res.ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV swarm security simulator: agent-based trust, rule-based "
                 "detection, and attack scenarios"};
    app.require_subcommand(1);

    // run
    std::string run_config;
    std::optional<std::uint64_t> run_seed;
    std::optional<double> run_range;
    std::optional<std::string> run_defense;
    std::optional<double> run_speed;
    bool run_json = false;
    std::string run_out, run_trace;
    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("config", run_config, "scenario TOML file")->required();
    run->add_option("--seed", run_seed, "override RNG seed");
    run->add_option("--range", run_range, "override radio range (m)");
    run->add_option("--defense", run_defense, "on|off");
    run->add_option("--speed", run_speed, "override UAV speed (m/s)");
    run->add_flag("--json", run_json, "emit report as JSON");
    run->add_option("--out", run_out, "write report to file instead of stdout");
    run->add_option("--trace", run_trace, "write the event trace to file");

    // sweep
    std::string sweep_config, sweep_axis, sweep_out;
    std::vector<double> sweep_values;
    std::uint32_t sweep_repeats = 5;
    unsigned sweep_jobs = 1;
    std::optional<std::string> sweep_defense;
    std::optional<std::uint64_t> sweep_seed;
    CLI::App* sw = app.add_subcommand("sweep", "sweep an axis over repeated seeds");
    sw->add_option("config", sweep_config, "scenario TOML file")->required();
    sw->add_option("--axis", sweep_axis, "n_uavs|malicious_fraction")->required();
    sw->add_option("--values", sweep_values, "axis values")->required()->delimiter(',');
    sw->add_option("--repeats", sweep_repeats, "seeds per value");
    sw->add_option("--jobs", sweep_jobs, "parallel runs");
    sw->add_option("--defense", sweep_defense, "on|off");
    sw->add_option("--seed", sweep_seed, "base seed");
    sw->add_option("--out", sweep_out, "output prefix (.csv/.dat)");

    // verify
    std::string verify_path;
    bool verify_json = false;
    CLI::App* vf = app.add_subcommand("verify", "recompute metrics and audit a trace");
    vf->add_option("trace", verify_path, "trace file from run --trace")->required();
    vf->add_flag("--json", verify_json, "emit result as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(run_config, run_seed, run_range, run_defense, run_speed, run_json,
                           run_out, run_trace);
        }
        if (sw->parsed()) {
            return cmd_sweep(sweep_config, sweep_axis, sweep_values, sweep_repeats, sweep_jobs,
                             sweep_out, sweep_defense, sweep_seed);
        }
        if (vf->parsed()) {
            return cmd_verify(verify_path, verify_json);
        }
    } catch (const sauav::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const sauav::toml::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
