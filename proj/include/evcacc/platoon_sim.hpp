#pragma once

// n-vehicle platoon simulation on a uniform time grid. Vehicle 0 is the
// leader; vehicle i follows vehicle i-1 over a zero-delay channel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "evcacc/cacc_control.hpp"
#include "evcacc/energy_model.hpp"
#include "evcacc/errors.hpp"
#include "evcacc/ev_dynamics.hpp"
#include "evcacc/gain_conditions.hpp"
#include "evcacc/leader.hpp"

namespace evcacc {

enum class ControllerKind { Lyapunov, PidBaseline };

inline const char* to_string(ControllerKind k) {
    return k == ControllerKind::Lyapunov ? "lyapunov" : "pid_baseline";
}

enum class GainViolationPolicy { Warn, Error };

struct InitialCondition {
    double speed = 0.0;           // common initial speed; drive cycles use the trace's first value
    std::vector<double> offsets;  // per follower (size n-1) added to the desired gap, empty = at desired
};

struct ScenarioConfig {
    std::size_t n_vehicles = 5;
    double dt = 0.01;
    double duration = 100.0;
    std::vector<VehicleParams> params; // one per vehicle
    ControllerKind controller = ControllerKind::Lyapunov;
    ControllerGains gains;
    PidGains pid;
    LeaderProfile leader = PiecewiseAcceleration{{{0.0, 0.0}}};
    InitialCondition initial;
    EnergyModelParams energy;
    GainViolationPolicy on_gain_violation = GainViolationPolicy::Warn;

    std::size_t steps() const { return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)); }

    double initial_speed() const {
        if (const auto* trace = std::get_if<SpeedTrace>(&leader)) return trace->speed(0.0);
        return initial.speed;
    }

    void validate() const {
        if (n_vehicles < 1) throw ConfigError("n_vehicles must be >= 1", "n_vehicles");
        if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0", "dt");
        if (!(duration > dt) || !std::isfinite(duration)) throw ConfigError("duration must exceed dt", "duration");
        if (params.size() != n_vehicles) {
            throw ConfigError("params must list one entry per vehicle", "vehicles");
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            try {
                params[i].validate();
            } catch (const ConfigError& e) {
                const std::string field = "vehicles[" + std::to_string(i) + "]." + e.field();
                throw ConfigError(field + ": " + e.what(), field);
            }
        }
        if (!initial.offsets.empty() && initial.offsets.size() + 1 != n_vehicles) {
            throw ConfigError("initial.offsets must have n_vehicles - 1 entries", "initial.offsets");
        }
        if (!std::isfinite(initial.speed) || initial.speed < 0) {
            throw ConfigError("initial.speed must be >= 0", "initial.speed");
        }
        if (controller == ControllerKind::PidBaseline) pid.validate();
        energy.validate();
        std::visit([](const auto& profile) { profile.validate(); }, leader);
    }
};

struct VehicleTrace {
    std::vector<double> x, v, a, u;
    std::vector<DriveMode> mode;
    std::vector<double> e1, e2, e3, r1, r2, P; // empty for the leader; P is NaN under the PID baseline
    std::vector<double> power;
    bool has_errors = false;
};

struct SimulationLog {
    double dt = 0.0;
    std::vector<double> time;
    std::vector<VehicleTrace> vehicles;
    ScenarioConfig config;
    std::vector<std::string> warnings;

    std::size_t samples() const { return time.size(); }
};

// Vehicle 0 at x = 0; each follower at its desired gap behind its
// predecessor, plus an optional per-follower offset.
inline std::vector<VehicleState> initialize_platoon(const ScenarioConfig& cfg) {
    const double v0 = cfg.initial_speed();
    std::vector<VehicleState> states(cfg.n_vehicles);
    for (std::size_t i = 0; i < cfg.n_vehicles; ++i) {
        states[i].velocity = v0;
        states[i].mode = DriveMode::Boundary;
        if (i == 0) continue;
        const VehicleParams& p = cfg.params[i];
        const double desired_gap = p.standstill + p.headway * v0;
        const double offset = cfg.initial.offsets.empty() ? 0.0 : cfg.initial.offsets[i - 1];
        const double gap = desired_gap + offset;
        if (!(gap > 0)) {
            throw ConfigError("initial offset for vehicle " + std::to_string(i) + " gives a non-positive gap",
                              "initial.offsets");
        }
        states[i].position = states[i - 1].position - cfg.params[i - 1].length - gap;
    }
    return states;
}

namespace detail {

// Per-vehicle rates at one integrator stage. The leader's input and PID
// inputs are algebraic and written back into `stage`; Lyapunov followers
// carry u as a state driven by the input filter.
struct VehicleRate {
    double x = 0.0, v = 0.0, a = 0.0, u = 0.0, integral = 0.0;
};

struct StageOutput {
    std::vector<VehicleRate> rate;
    std::vector<SpacingErrors> errors;
    std::vector<double> P;
};

inline double leader_input(const ScenarioConfig& cfg, double step_start, double t, const VehicleState& leader) {
    // Piecewise profiles switch on grid points and are held across a step.
    const double when = std::holds_alternative<PiecewiseAcceleration>(cfg.leader) ? step_start : t;
    const double limit = cfg.params[0].input_limit;
    return std::clamp(leader_command(cfg.leader, when, leader), -limit, limit);
}

inline StageOutput stage_rates(const ScenarioConfig& cfg, double step_start, double t,
                               std::vector<VehicleState>& stage, const std::vector<double>& integral) {
    const std::size_t n = stage.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    StageOutput out;
    out.rate.resize(n);
    out.errors.resize(n);
    out.P.assign(n, nan);

    stage[0].control_input = leader_input(cfg, step_start, t, stage[0]);
    for (std::size_t i = 0; i < n; ++i) {
        const VehicleParams& p = cfg.params[i];
        VehicleState& self = stage[i];
        VehicleRate& r = out.rate[i];
        if (i > 0) {
            const VehicleState& pred = stage[i - 1];
            const PredecessorBroadcast msg = PredecessorBroadcast::from(pred, cfg.params[i - 1]);
            if (cfg.controller == ControllerKind::Lyapunov) {
                out.errors[i] = spacing_errors(pred, self, cfg.params[i - 1], p, cfg.gains);
                const double P = control_law_P(out.errors[i], self, msg, p, cfg.gains);
                out.P[i] = P;
                r.u = control_input_rate(P, self.control_input, p);
            } else {
                // e1 and e2 do not depend on u, so the command can be formed
                // before the errors are refreshed with it.
                const SpacingErrors pre = spacing_errors(pred, self, cfg.params[i - 1], p, cfg.gains);
                self.control_input = pid_command(pre, msg, cfg.pid, integral[i], p.input_limit);
                out.errors[i] = spacing_errors(pred, self, cfg.params[i - 1], p, cfg.gains);
                r.integral = out.errors[i].e1;
            }
        }
        self.mode = mode_of(self.control_input, p.deadband);
        const StateDerivative d = derivative(self, self.control_input, p);
        r.x = d.d_position;
        r.v = d.d_velocity;
        r.a = d.d_acceleration;
    }
    return out;
}

inline void require_finite(const VehicleState& s, std::size_t vehicle, std::size_t step) {
    if (!std::isfinite(s.position) || !std::isfinite(s.velocity) || !std::isfinite(s.acceleration) ||
        !std::isfinite(s.control_input)) {
        throw NumericError("non-finite state for vehicle " + std::to_string(vehicle) + " at step " +
                               std::to_string(step),
                           step);
    }
}

} // namespace detail

// The platoon is advanced as one coupled ODE with classical RK4. Controllers
// are evaluated at every stage from the stage states of the vehicle and its
// predecessor; logged errors, P and inputs are the grid-point values.
inline SimulationLog run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    SimulationLog log;
    log.dt = cfg.dt;
    log.config = cfg;

    if (cfg.controller == ControllerKind::Lyapunov && cfg.n_vehicles > 1) {
        const GainCheckReport check = check_gain_conditions(cfg.gains);
        if (!check.overall) {
            const std::string msg = "controller gains violate the sufficient stability conditions";
            if (cfg.on_gain_violation == GainViolationPolicy::Error) throw ConfigError(msg, "gains");
            log.warnings.push_back(msg);
        }
    }

    const std::size_t steps = cfg.steps();
    const std::size_t n = cfg.n_vehicles;
    const double h = cfg.dt;

    log.time.resize(steps + 1);
    log.vehicles.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        VehicleTrace& tr = log.vehicles[i];
        tr.has_errors = i > 0;
        for (auto* series : {&tr.x, &tr.v, &tr.a, &tr.u, &tr.power}) series->reserve(steps + 1);
        tr.mode.reserve(steps + 1);
        if (tr.has_errors) {
            for (auto* series : {&tr.e1, &tr.e2, &tr.e3, &tr.r1, &tr.r2, &tr.P}) series->reserve(steps + 1);
        }
    }

    std::vector<VehicleState> states = initialize_platoon(cfg);
    std::vector<double> integral(n, 0.0);
    const bool filtered = cfg.controller == ControllerKind::Lyapunov;

    auto offset = [&](const std::vector<VehicleState>& base, const std::vector<double>& base_int,
                      const detail::StageOutput& k, double c, std::vector<double>& out_int) {
        std::vector<VehicleState> out = base;
        out_int = base_int;
        for (std::size_t i = 0; i < n; ++i) {
            out[i].position += c * k.rate[i].x;
            out[i].velocity += c * k.rate[i].v;
            out[i].acceleration += c * k.rate[i].a;
            if (i > 0 && filtered) {
                const double lim = cfg.params[i].input_limit;
                out[i].control_input = std::clamp(out[i].control_input + c * k.rate[i].u, -lim, lim);
            }
            out_int[i] += c * k.rate[i].integral;
        }
        return out;
    };

    std::size_t k = 0;
    try {
        for (;; ++k) {
            const double t = h * static_cast<double>(k);
            log.time[k] = t;

            // Stage 1 at the grid point doubles as the logged sample.
            std::vector<VehicleState> s1 = states;
            const detail::StageOutput k1 = detail::stage_rates(cfg, t, t, s1, integral);
            for (std::size_t i = 0; i < n; ++i) {
                detail::require_finite(s1[i], i, k);
                const VehicleState& s = s1[i];
                VehicleTrace& tr = log.vehicles[i];
                tr.x.push_back(s.position);
                tr.v.push_back(s.velocity);
                tr.a.push_back(s.acceleration);
                tr.u.push_back(s.control_input);
                tr.mode.push_back(s.mode);
                tr.power.push_back(instantaneous_power(s, cfg.energy));
                if (tr.has_errors) {
                    const SpacingErrors& e = k1.errors[i];
                    tr.e1.push_back(e.e1);
                    tr.e2.push_back(e.e2);
                    tr.e3.push_back(e.e3);
                    tr.r1.push_back(e.r1);
                    tr.r2.push_back(e.r2);
                    tr.P.push_back(k1.P[i]);
                }
            }
            if (k == steps) break;

            std::vector<double> i2, i3, i4;
            std::vector<VehicleState> s2 = offset(s1, integral, k1, 0.5 * h, i2);
            const detail::StageOutput k2 = detail::stage_rates(cfg, t, t + 0.5 * h, s2, i2);
            std::vector<VehicleState> s3 = offset(s1, integral, k2, 0.5 * h, i3);
            const detail::StageOutput k3 = detail::stage_rates(cfg, t, t + 0.5 * h, s3, i3);
            std::vector<VehicleState> s4 = offset(s1, integral, k3, h, i4);
            const detail::StageOutput k4 = detail::stage_rates(cfg, t, t + h, s4, i4);

            for (std::size_t i = 0; i < n; ++i) {
                auto blend = [&](auto field) {
                    return h / 6.0 * (field(k1.rate[i]) + 2.0 * field(k2.rate[i]) + 2.0 * field(k3.rate[i]) +
                                      field(k4.rate[i]));
                };
                VehicleState& s = states[i];
                s.position += blend([](const detail::VehicleRate& r) { return r.x; });
                s.velocity += blend([](const detail::VehicleRate& r) { return r.v; });
                s.acceleration += blend([](const detail::VehicleRate& r) { return r.a; });
                if (i > 0 && filtered) {
                    const double lim = cfg.params[i].input_limit;
                    s.control_input =
                        std::clamp(s.control_input + blend([](const detail::VehicleRate& r) { return r.u; }), -lim, lim);
                }
                integral[i] += blend([](const detail::VehicleRate& r) { return r.integral; });
                detail::require_finite(s, i, k + 1);
            }
        }
    } catch (const NumericError& e) {
        if (e.step() != NumericError::npos) throw;
        throw NumericError(std::string(e.what()) + " at step " + std::to_string(k), k);
    }
    return log;
}

} // namespace evcacc
