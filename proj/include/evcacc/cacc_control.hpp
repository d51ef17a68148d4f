#pragma once

// Lyapunov-based CACC law and a PID-style baseline.
//
// The Lyapunov controller does not command u directly. It computes a
// filtered signal P = beta_i(u) (b u' + u) and the input follows the
// first-order filter b u' + u = P / beta_i(u).

#include <algorithm>
#include <cmath>

#include "evcacc/errors.hpp"
#include "evcacc/ev_dynamics.hpp"

namespace evcacc {

struct ControllerGains {
    double alpha1 = 2.0;   // 1/s
    double alpha2 = 3.0;   // 1/s
    double c_gain = 4.0;
    double epsilon1 = 1.0; // Young's-inequality weight, only enters the sufficient conditions
};

struct SpacingErrors {
    double e1 = 0.0;  // m, spacing error
    double e2 = 0.0;  // m/s, e1'
    double e3 = 0.0;  // m/s^2, e2'
    double r1 = 0.0;  // m/s
    double r2 = 0.0;  // m/s^2
    double phi = 0.0; // m/s^3
};

// What a vehicle broadcasts to its follower every step.
struct PredecessorBroadcast {
    double control_input = 0.0;
    double acceleration = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    static PredecessorBroadcast from(const VehicleState& s, const VehicleParams& p) {
        const auto [gamma, beta] = mode_coefficients(s.control_input, p);
        return {s.control_input, s.acceleration, beta, gamma};
    }
};

struct PidGains {
    double kp = 0.6;                 // 1/s^2
    double ki = 0.05;                // 1/s^3
    double kd = 1.0;                 // 1/s
    double feedforward_weight = 0.6; // on the predecessor's input

    void validate() const {
        if (!std::isfinite(kp) || !(kp > 0)) throw ConfigError("pid.kp must be > 0", "pid.kp");
        if (!std::isfinite(ki)) throw ConfigError("pid.ki must be finite", "pid.ki");
        if (!std::isfinite(kd)) throw ConfigError("pid.kd must be finite", "pid.kd");
        if (!std::isfinite(feedforward_weight)) {
            throw ConfigError("pid.feedforward_weight must be finite", "pid.feedforward_weight");
        }
    }
};

// Trapezoidal integrator memory for the baseline.
struct PidState {
    double integral = 0.0; // m*s
    double last_e1 = 0.0;
    bool primed = false;
};

inline double phi(const PredecessorBroadcast& pred, const VehicleState& follower, const VehicleParams& p) {
    const auto [gamma, beta] = mode_coefficients(follower.control_input, p);
    const double jerk = -gamma * follower.acceleration + beta * follower.control_input;
    return pred.gamma * pred.acceleration - gamma * follower.acceleration - p.headway * gamma * jerk;
}

inline SpacingErrors spacing_errors(const VehicleState& pred, const VehicleState& follower,
                                    const VehicleParams& pred_params, const VehicleParams& params,
                                    const ControllerGains& gains) {
    const bool finite = std::isfinite(pred.position) && std::isfinite(pred.velocity) &&
                        std::isfinite(pred.acceleration) && std::isfinite(pred.control_input) &&
                        std::isfinite(follower.position) && std::isfinite(follower.velocity) &&
                        std::isfinite(follower.acceleration) && std::isfinite(follower.control_input);
    if (!finite) throw NumericError("spacing_errors: non-finite state");

    const double b = params.headway;
    const double jerk = model_jerk(follower.acceleration, follower.control_input, params);

    SpacingErrors e;
    const double gap = pred.position - follower.position - pred_params.length;
    e.e1 = gap - (params.standstill + b * follower.velocity);
    e.e2 = pred.velocity - follower.velocity - b * follower.acceleration;
    e.e3 = pred.acceleration - follower.acceleration - b * jerk;
    e.r1 = e.e2 + gains.alpha1 * e.e1;
    e.r2 = (e.e3 + gains.alpha1 * e.e2) + gains.alpha2 * e.r1;
    e.phi = phi(PredecessorBroadcast::from(pred, pred_params), follower, params);
    return e;
}

// Filtered control signal P. beta_i is resolved at the follower's current u.
inline double control_law_P(const SpacingErrors& e, const VehicleState& follower,
                            const PredecessorBroadcast& pred, const VehicleParams& params,
                            const ControllerGains& g) {
    const double beta = mode_coefficients(follower.control_input, params).beta;
    return (g.alpha1 + g.alpha2) * e.e3 + beta * g.c_gain * e.r2 + pred.beta * pred.control_input +
           (g.alpha1 * g.alpha2 + 1.0) * e.r1 - g.alpha2 * g.alpha1 * g.alpha1 * e.e1 - e.phi;
}

// Input-filter trajectory over one step with P held: the exact solution of
// b u' + u = P / beta with the mode frozen at the start of the step, clamped
// to the actuator limit.
struct InputFilterSegment {
    double start = 0.0;
    double target = 0.0;
    double time_constant = 1.0;
    double limit = 0.0;

    double operator()(double elapsed) const {
        const double u = target + (start - target) * std::exp(-elapsed / time_constant);
        return std::clamp(u, -limit, limit);
    }
};

// beta used by the filter: at u_current outside the deadband, otherwise the
// mode P is pushing the input into.
inline double filter_beta(double P, double u_current, const VehicleParams& p) {
    if (std::abs(u_current) > p.deadband) return mode_coefficients(u_current, p).beta;
    if (P > 0) return p.beta_accel;
    if (P < 0) return p.beta_decel;
    return mode_coefficients(DriveMode::Boundary, p).beta;
}

inline InputFilterSegment input_filter_segment(double P, double u_current, const VehicleParams& p) {
    return {u_current, P / filter_beta(P, u_current, p), p.headway, p.input_limit};
}

inline double update_control_input(double P, double u_current, const VehicleParams& p, double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw ConfigError("update_control_input: dt must be > 0", "dt");
    }
    return input_filter_segment(P, u_current, p)(dt);
}

// u' of the filter for the simulator's continuous closed loop. At the
// actuator limit the input cannot move further outward.
inline double control_input_rate(double P, double u_current, const VehicleParams& p) {
    const double rate = (P / filter_beta(P, u_current, p) - u_current) / p.headway;
    if (u_current >= p.input_limit && rate > 0) return 0.0;
    if (u_current <= -p.input_limit && rate < 0) return 0.0;
    return rate;
}

inline double pid_command(const SpacingErrors& e, const PredecessorBroadcast& pred, const PidGains& pid,
                          double integral, double input_limit) {
    const double u = pid.kp * e.e1 + pid.ki * integral + pid.kd * e.e2 + pid.feedforward_weight * pred.control_input;
    return std::clamp(u, -input_limit, input_limit);
}

struct PidOutput {
    double u;
    PidState state;
};

inline PidOutput pid_baseline(const SpacingErrors& e, const PredecessorBroadcast& pred, const PidGains& pid,
                              const PidState& state, double dt, double input_limit) {
    if (!(dt > 0)) throw ConfigError("pid_baseline: dt must be > 0", "dt");
    PidState next = state;
    if (next.primed) next.integral += 0.5 * dt * (next.last_e1 + e.e1);
    next.last_e1 = e.e1;
    next.primed = true;
    return {pid_command(e, pred, pid, next.integral, input_limit), next};
}

} // namespace evcacc
