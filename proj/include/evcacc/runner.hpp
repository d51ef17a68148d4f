#pragma once

// Commands behind the evcacc executable. Each one reads a run configuration,
// writes its artifacts under the output directory and returns an exit code:
// 0 success, 1 check failure, 2 configuration error, 3 numeric failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "evcacc/config.hpp"
#include "evcacc/csv_io.hpp"
#include "evcacc/gain_conditions.hpp"
#include "evcacc/metrics.hpp"
#include "evcacc/platoon_sim.hpp"
#include "evcacc/stability_monitor.hpp"
#include "evcacc/sysid.hpp"

namespace evcacc {

enum ExitCode : int { kExitSuccess = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitNumericError = 3 };

struct RunManifest {
    std::string command; // simulate, sweep-headway, compare, sysid, verify-gains
    std::filesystem::path config_path;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> headways; // overrides the config's sweep list
};

namespace detail {

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string() + ": cannot write");
    out << j.dump(2) << '\n';
}

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json numbers_json(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) out.push_back(number_or_null(x));
    return out;
}

inline json string_stability_json(const SimulationLog& log, const StringStabilityOptions& opt) {
    if (log.vehicles.size() < 2) return {{"omega", json::array()}, {"average", nullptr}};
    try {
        const StringStabilityReport r = string_stability_criterion(log, opt);
        bool at_most_one = true;
        for (double w : r.omega) at_most_one = at_most_one && w <= 1.0;
        return {{"omega", r.omega},
                {"average", r.platoon_average},
                {"monotone_nonincreasing", r.monotone_nonincreasing},
                {"all_at_most_one", at_most_one}};
    } catch (const DomainError& e) {
        return {{"omega", json::array()}, {"average", nullptr}, {"note", e.what()}};
    }
}

inline bool dwell_ok(const DwellReport& d, double dt) {
    return d.switch_count < 2 || (d.min_interval > 10.0 * dt && d.min_interval >= d.kappa_min_estimate);
}

} // namespace detail

// Metric tables for one run.
inline json run_summary(const RunConfig& rc, const SimulationLog& log) {
    const ScenarioConfig& sc = rc.scenario;
    json s;
    s["integrator"] = {{"method", "rk4"},
                       {"dt", log.dt},
                       {"steps", log.samples() - 1},
                       {"samples", log.samples()}};
    s["controller"] = to_string(sc.controller);
    s["string_stability"] = detail::string_stability_json(log, rc.metrics);

    const RmseReport rmse = distance_rmse(log);
    s["rmse"] = {{"per_follower", rmse.per_follower},
                 {"average", rmse.per_follower.empty() ? json(nullptr) : json(rmse.platoon_average)}};

    const EnergyReport e = total_energy(log);
    s["energy"] = {{"per_vehicle_j", e.consumed},
                   {"recovered_j", e.recovered},
                   {"platoon_total_j", e.platoon_total},
                   {"platoon_average_j", e.platoon_average}};
    s["min_gap_m"] = minimum_gaps(log);

    json gains = json::object();
    try {
        const GainCheckReport g = check_gain_conditions(sc.gains);
        gains = {{"margin_alpha2", g.margin_alpha2}, {"margin_alpha1", g.margin_alpha1}, {"margin_c", g.margin_c},
                 {"overall", g.overall}};
        const VehicleParams& p = sc.params[sc.n_vehicles > 1 ? 1 : 0];
        gains["lambda"] = g.overall ? json(lambda_bound(sc.gains, p)) : json(nullptr);
    } catch (const DomainError& ex) {
        gains = {{"overall", false}, {"note", ex.what()}};
    }
    s["gain_check"] = gains;

    json dwell = json::array();
    for (std::size_t i = 0; i < log.vehicles.size(); ++i) {
        const DwellReport d = dwell_time_report(log.vehicles[i].u, log.dt, sc.params[i].deadband);
        dwell.push_back({{"vehicle", i},
                         {"switch_count", d.switch_count},
                         {"min_interval_s", detail::number_or_null(d.min_interval)},
                         {"delta_hat", d.delta_hat},
                         {"lipschitz_hat", d.lipschitz_hat},
                         {"kappa_min_estimate_s", d.kappa_min_estimate},
                         {"ok", detail::dwell_ok(d, log.dt)}});
    }
    s["dwell"] = dwell;

    // Decay audit after the leader input settles; only meaningful when the
    // gains admit a decay rate.
    json decay = json::array();
    const double settle = leader_last_change(sc.leader);
    const double end = log.time.empty() ? 0.0 : log.time.back();
    if (sc.controller == ControllerKind::Lyapunov && gains.value("overall", false) && end - settle > 10 * log.dt) {
        for (std::size_t i = 1; i < log.vehicles.size(); ++i) {
            const LyapunovTrace t = verify_decay(log, i, sc.gains, sc.params[i], settle, end);
            decay.push_back({{"vehicle", i},
                             {"window", {settle, end}},
                             {"lambda", t.lambda},
                             {"violations", t.violations.size()}});
        }
    }
    s["decay"] = decay;
    s["warnings"] = log.warnings;
    return s;
}

// Runs one scenario into `dir`: trajectories, resolved config and summary.
inline json run_to_directory(const RunConfig& rc, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const SimulationLog log = run_scenario(rc.scenario);
    json files = json::array();
    for (std::size_t i = 0; i < log.vehicles.size(); ++i) {
        const std::string name = "vehicle_" + std::to_string(i) + ".csv";
        write_trajectory(dir / name, log, i);
        files.push_back(name);
    }
    const json config = to_json(rc);
    detail::write_json(dir / "config.resolved.json", config);
    json summary = run_summary(rc, log);
    summary["trajectories"] = files;
    summary["config"] = config;
    detail::write_json(dir / "summary.json", summary);
    return summary;
}

inline int simulate(const RunManifest& m, std::ostream& out) {
    const RunConfig rc = load_run_config(m.config_path);
    const json s = run_to_directory(rc, m.output_dir);
    out << "simulated " << rc.scenario.n_vehicles << " vehicles, " << s["integrator"]["samples"] << " samples -> "
        << m.output_dir.string() << '\n';
    for (const auto& w : s["warnings"]) out << "warning: " << w.get<std::string>() << '\n';
    return kExitSuccess;
}

inline int sweep_headway(const RunManifest& m, std::ostream& out) {
    const RunConfig base = load_run_config(m.config_path);
    const std::vector<double> headways = m.headways ? *m.headways : base.sweep.headways;
    if (headways.empty()) throw ConfigError("sweep-headway: no headway values given", "sweep.headways");
    for (double b : headways) {
        if (!(b > 0) || !std::isfinite(b)) throw ConfigError("sweep-headway: headways must be > 0", "sweep.headways");
    }

    std::vector<std::future<json>> jobs;
    for (double b : headways) {
        RunConfig rc = base;
        for (VehicleParams& p : rc.scenario.params) p.headway = b;
        rc.sweep.headways = {b};
        const std::filesystem::path dir = m.output_dir / ("headway_" + format_number(b));
        jobs.push_back(std::async(std::launch::async, [rc, dir] { return run_to_directory(rc, dir); }));
    }

    json rows = json::array();
    bool failed = false;
    std::optional<double> stable;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        json row = {{"headway", headways[k]}, {"directory", "headway_" + format_number(headways[k])}};
        try {
            const json s = jobs[k].get();
            row["status"] = "ok";
            row["string_stability"] = s["string_stability"];
            row["rmse"] = s["rmse"];
            row["energy_platoon_average_j"] = s["energy"]["platoon_average_j"];
            const json& ss = s["string_stability"];
            if (ss.value("all_at_most_one", false) && ss.value("monotone_nonincreasing", false) &&
                (!stable || headways[k] < *stable)) {
                stable = headways[k];
            }
        } catch (const std::exception& e) {
            failed = true;
            row["status"] = std::string("failed: ") + e.what();
        }
        rows.push_back(row);
    }

    json summary = {{"command", "sweep-headway"},
                    {"rows", rows},
                    {"smallest_string_stable_headway", stable ? json(*stable) : json(nullptr)},
                    {"config", to_json(base)}};
    std::filesystem::create_directories(m.output_dir);
    detail::write_json(m.output_dir / "summary.json", summary);

    out << std::setw(10) << "headway" << std::setw(14) << "avg omega" << std::setw(14) << "rmse [m]" << "  status\n";
    for (const json& r : rows) {
        out << std::setw(10) << r["headway"].get<double>();
        if (r["status"] == "ok" && r["string_stability"]["average"].is_number()) {
            out << std::setw(14) << std::setprecision(8) << r["string_stability"]["average"].get<double>()
                << std::setw(14) << std::setprecision(4) << r["rmse"]["average"].get<double>() << "  ok\n";
        } else {
            out << "  " << r["status"].get<std::string>() << '\n';
        }
    }
    out << std::setprecision(6) << "smallest string-stable headway: "
        << (stable ? format_number(*stable) : std::string("none")) << '\n';
    return failed ? kExitNumericError : kExitSuccess;
}

inline int compare(const RunManifest& m, std::ostream& out) {
    const RunConfig base = load_run_config(m.config_path);
    auto variant = [&base](ControllerKind k) {
        RunConfig rc = base;
        rc.scenario.controller = k;
        return rc;
    };
    const RunConfig proposed = variant(base.compare.proposed);
    const RunConfig baseline = variant(base.compare.baseline);
    proposed.scenario.validate();
    baseline.scenario.validate();

    const std::string pdir = std::string("proposed_") + to_string(base.compare.proposed);
    const std::string bdir = std::string("baseline_") + to_string(base.compare.baseline);
    auto pjob = std::async(std::launch::async, [&] { return run_to_directory(proposed, m.output_dir / pdir); });
    auto bjob = std::async(std::launch::async, [&] { return run_to_directory(baseline, m.output_dir / bdir); });
    const json ps = pjob.get();
    const json bs = bjob.get();

    auto side = [](const json& s, const std::string& dir) {
        return json{{"controller", s["controller"]},
                    {"directory", dir},
                    {"string_stability", s["string_stability"]},
                    {"rmse", s["rmse"]},
                    {"energy_platoon_average_j", s["energy"]["platoon_average_j"]},
                    {"min_gap_m", s["min_gap_m"]}};
    };
    auto relative = [](const json& b, const json& p) -> json {
        if (!b.is_number() || !p.is_number() || b.get<double>() == 0.0) return nullptr;
        return (b.get<double>() - p.get<double>()) / b.get<double>();
    };
    const json rel_energy = relative(bs["energy"]["platoon_average_j"], ps["energy"]["platoon_average_j"]);
    const json rel_omega = relative(bs["string_stability"]["average"], ps["string_stability"]["average"]);
    const json rel_rmse = relative(bs["rmse"]["average"], ps["rmse"]["average"]);

    json summary = {{"command", "compare"},
                    {"proposed", side(ps, pdir)},
                    {"baseline", side(bs, bdir)},
                    {"relative_energy_change", rel_energy},
                    {"relative_string_stability_change", rel_omega},
                    {"relative_rmse_change", rel_rmse},
                    {"config", to_json(base)}};
    detail::write_json(m.output_dir / "summary.json", summary);

    auto show = [&out](const char* label, const json& s) {
        out << std::setw(10) << label << "  " << std::setw(12) << s["controller"].get<std::string>();
        const json& avg = s["string_stability"]["average"];
        out << "  avg omega " << (avg.is_number() ? format_number(avg.get<double>()) : std::string("-"));
        out << "  energy " << std::fixed << std::setprecision(1) << s["energy_platoon_average_j"].get<double>() / 1e3
            << " kJ\n"
            << std::defaultfloat;
    };
    show("proposed", summary["proposed"]);
    show("baseline", summary["baseline"]);
    if (rel_energy.is_number()) {
        out << "relative energy change (E_base - E_prop) / E_base: " << std::setprecision(4)
            << 100.0 * rel_energy.get<double>() << " %\n";
    }
    return kExitSuccess;
}

namespace detail {

struct TrialSet {
    std::vector<StepTrial> motoring, regen;
};

inline TrialSet read_trial_manifest(const std::filesystem::path& manifest) {
    const ConfigDocument doc = load_config_file(manifest);
    ObjectReader r(doc, doc.root, "");
    const json* list = r.find("trials");
    r.finish();
    if (!list || !list->is_array() || list->empty()) throw doc.anchored("trials", "expected a non-empty array");
    TrialSet set;
    for (std::size_t k = 0; k < list->size(); ++k) {
        const std::string field = "trials[" + std::to_string(k) + "]";
        ObjectReader t(doc, (*list)[k], field);
        std::string file, mode;
        double command = 0.0;
        t.text("file", file);
        t.text("mode", mode);
        t.number("command", command);
        t.finish();
        if (mode != "motoring" && mode != "regen") throw doc.anchored(field + ".mode", "expected motoring or regen");
        const TrialMode tm = mode == "motoring" ? TrialMode::Motoring : TrialMode::Regen;
        if (command == 0.0 || (tm == TrialMode::Motoring) != (command > 0)) {
            throw doc.anchored(field + ".command", "sign must match the mode and be nonzero");
        }
        (tm == TrialMode::Motoring ? set.motoring : set.regen)
            .push_back(read_trial_csv(doc.base_dir / file, command, tm));
    }
    return set;
}

inline TrialSet synthesize_trials(const SysidSettings& s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TrialSet set;
    for (std::size_t k = 0; k < s.trials; ++k) {
        for (auto* group : {&set.motoring, &set.regen}) {
            const auto& commands = group == &set.motoring ? s.motoring_commands : s.regen_commands;
            if (commands.empty()) continue;
            StepTrial t = synthesize_step_trial(s.truth, commands[k % commands.size()], s.dt, s.duration);
            if (s.noise > 0) add_multiplicative_noise(t, s.noise, rng);
            group->push_back(std::move(t));
        }
    }
    return set;
}

inline void write_trial_set(const std::filesystem::path& dir, const TrialSet& set) {
    std::filesystem::create_directories(dir);
    json list = json::array();
    for (const auto* group : {&set.motoring, &set.regen}) {
        for (std::size_t k = 0; k < group->size(); ++k) {
            const StepTrial& t = (*group)[k];
            const std::string name = std::string(to_string(t.mode)) + "_" + std::to_string(k) + ".csv";
            write_trial_csv(dir / name, t);
            list.push_back({{"file", name}, {"mode", to_string(t.mode)}, {"command", t.command_magnitude}});
        }
    }
    write_json(dir / "manifest.json", {{"trials", list}});
}

} // namespace detail

inline int sysid(const RunManifest& m, std::ostream& out) {
    const RunConfig rc = load_run_config(m.config_path);
    const SysidSettings& s = rc.sysid;
    std::filesystem::create_directories(m.output_dir);

    detail::TrialSet set;
    const bool synthetic = s.manifest.empty();
    if (synthetic) {
        set = detail::synthesize_trials(s, m.seed);
        detail::write_trial_set(m.output_dir / "trials", set);
    } else {
        set = detail::read_trial_manifest(m.config_path.parent_path() / s.manifest);
    }

    auto fit = [&s](const std::vector<StepTrial>& trials) { return fit_first_order(average_trials(trials), s.fit); };
    std::optional<std::future<ModeFit>> fm, fr;
    if (!set.motoring.empty()) fm = std::async(std::launch::async, fit, std::cref(set.motoring));
    if (!set.regen.empty()) fr = std::async(std::launch::async, fit, std::cref(set.regen));
    if (!fm && !fr) throw ConfigError("sysid: no trials", "sysid");

    json fits = json::object();
    auto report = [&](const char* mode, std::optional<std::future<ModeFit>>& job, double g0, double b0, std::size_t n) {
        if (!job) return;
        const ModeFit f = job->get();
        json row = {{"gamma", f.gamma}, {"beta", f.beta}, {"residual_rms", f.residual_rms}, {"trials", n}};
        if (synthetic) {
            row["truth"] = {{"gamma", g0}, {"beta", b0}};
            row["relative_error"] = {{"gamma", std::abs(f.gamma - g0) / g0}, {"beta", std::abs(f.beta - b0) / b0}};
        }
        out << std::setw(9) << mode << "  gamma " << std::setprecision(6) << f.gamma << "  beta " << f.beta
            << "  residual " << f.residual_rms << '\n';
        fits[mode] = row;
    };
    report("motoring", fm, s.truth.gamma_accel, s.truth.beta_accel, set.motoring.size());
    report("regen", fr, s.truth.gamma_decel, s.truth.beta_decel, set.regen.size());

    json summary = {{"command", "sysid"},
                    {"seed", m.seed},
                    {"synthetic", synthetic},
                    {"fits", fits},
                    {"config", to_json(rc)}};
    detail::write_json(m.output_dir / "summary.json", summary);
    return kExitSuccess;
}

inline int verify_gains(const RunManifest& m, std::ostream& out) {
    const RunConfig rc = load_run_config(m.config_path);
    const ControllerGains& g = rc.scenario.gains;
    const GainCheckReport r = check_gain_conditions(g);
    auto line = [&out](const char* label, double margin, bool ok) {
        out << std::left << std::setw(26) << label << std::right << std::setw(12) << margin << "  "
            << (ok ? "ok" : "FAILED") << '\n';
    };
    line("alpha2 - epsilon1/2", r.margin_alpha2, r.condition_alpha2);
    line("alpha1 - 1/(2 epsilon1)", r.margin_alpha1, r.condition_alpha1);
    line("C", r.margin_c, r.condition_c);

    json summary = {{"command", "verify-gains"},
                    {"margin_alpha2", r.margin_alpha2},
                    {"margin_alpha1", r.margin_alpha1},
                    {"margin_c", r.margin_c},
                    {"overall", r.overall}};
    if (r.overall) {
        const VehicleParams& p = rc.scenario.params[rc.scenario.n_vehicles > 1 ? 1 : 0];
        const double lambda = lambda_bound(g, p);
        out << "lambda = " << lambda << '\n';
        summary["lambda"] = lambda;
    }
    out << (r.overall ? "gain conditions hold\n" : "gain conditions violated\n");
    if (!m.output_dir.empty()) {
        std::filesystem::create_directories(m.output_dir);
        summary["config"] = to_json(rc);
        detail::write_json(m.output_dir / "summary.json", summary);
    }
    return r.overall ? kExitSuccess : kExitCheckFailed;
}

// Dispatch with the exception-to-exit-code mapping.
inline int run_command(const RunManifest& m, std::ostream& out, std::ostream& err) {
    try {
        if (m.command == "simulate") return simulate(m, out);
        if (m.command == "sweep-headway") return sweep_headway(m, out);
        if (m.command == "compare") return compare(m, out);
        if (m.command == "sysid") return sysid(m, out);
        if (m.command == "verify-gains") return verify_gains(m, out);
        err << "unknown command '" << m.command << "'\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumericError;
    } catch (const FitError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumericError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumericError;
    }
}

} // namespace evcacc
