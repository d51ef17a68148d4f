#pragma once

// Switched third-order longitudinal model of an electric vehicle:
//
//   x' = v
//   v' = a
//   a' = -gamma(u) a + beta(u) u
//
// with separate (gamma, beta) pairs for motoring (u > 0) and regenerative
// braking (u < 0). Inside a small deadband around u = 0 both weights of the
// sign-switched blend are 1/2, i.e. the coefficients are the arithmetic mean
// of the two modes.

#include <cmath>
#include <string>
#include <string_view>

#include "evcacc/errors.hpp"

namespace evcacc {

enum class DriveMode { Motoring, Regen, Boundary };

inline std::string_view to_string(DriveMode mode) {
    switch (mode) {
    case DriveMode::Motoring: return "motoring";
    case DriveMode::Regen: return "regen";
    case DriveMode::Boundary: return "boundary";
    }
    return "boundary";
}

inline DriveMode drive_mode_from_string(std::string_view name) {
    if (name == "motoring") return DriveMode::Motoring;
    if (name == "regen") return DriveMode::Regen;
    if (name == "boundary") return DriveMode::Boundary;
    throw ConfigError("unknown drive mode '" + std::string(name) + "'");
}

struct VehicleParams {
    double gamma_accel = 0.6998; // 1/s, motoring lag
    double gamma_decel = 0.9009; // 1/s, regen lag
    double beta_accel = 0.7378;  // 1/s, motoring input gain
    double beta_decel = 0.9315;  // 1/s, regen input gain
    double length = 4.75;        // m
    double standstill = 5.0;     // m
    double headway = 0.5;        // s
    double deadband = 0.05;      // m/s^2, |u| at or below this is the switching surface
    double input_limit = 4.0;    // m/s^2, actuator saturation |u| <= input_limit

    void validate() const {
        auto require = [](bool ok, const char* field, const char* rule) {
            if (!ok) throw ConfigError(std::string(field) + " " + rule, field);
        };
        require(std::isfinite(gamma_accel) && gamma_accel > 0, "gamma_accel", "must be > 0");
        require(std::isfinite(gamma_decel) && gamma_decel > 0, "gamma_decel", "must be > 0");
        require(std::isfinite(beta_accel) && beta_accel > 0, "beta_accel", "must be > 0");
        require(std::isfinite(beta_decel) && beta_decel > 0, "beta_decel", "must be > 0");
        require(std::isfinite(length) && length > 0, "length", "must be > 0");
        require(std::isfinite(standstill) && standstill >= 0, "standstill", "must be >= 0");
        require(std::isfinite(headway) && headway > 0, "headway", "must be > 0");
        require(std::isfinite(deadband) && deadband >= 0, "deadband", "must be >= 0");
        require(std::isfinite(input_limit) && input_limit > 0, "input_limit", "must be > 0");
    }
};

struct VehicleState {
    double position = 0.0;      // m
    double velocity = 0.0;      // m/s
    double acceleration = 0.0;  // m/s^2
    double control_input = 0.0; // m/s^2
    DriveMode mode = DriveMode::Boundary;
};

struct StateDerivative {
    double d_position = 0.0;
    double d_velocity = 0.0;
    double d_acceleration = 0.0;
};

struct ModeCoefficients {
    double gamma;
    double beta;
};

inline DriveMode mode_of(double u, double deadband) {
    if (u > deadband) return DriveMode::Motoring;
    if (u < -deadband) return DriveMode::Regen;
    return DriveMode::Boundary;
}

inline ModeCoefficients mode_coefficients(DriveMode mode, const VehicleParams& p) {
    switch (mode) {
    case DriveMode::Motoring: return {p.gamma_accel, p.beta_accel};
    case DriveMode::Regen: return {p.gamma_decel, p.beta_decel};
    case DriveMode::Boundary: break;
    }
    return {0.5 * (p.gamma_accel + p.gamma_decel), 0.5 * (p.beta_accel + p.beta_decel)};
}

inline ModeCoefficients mode_coefficients(double u, const VehicleParams& p) {
    return mode_coefficients(mode_of(u, p.deadband), p);
}

// Jerk predicted by the model at acceleration a under input u.
inline double model_jerk(double a, double u, const VehicleParams& p) {
    const auto [gamma, beta] = mode_coefficients(u, p);
    return -gamma * a + beta * u;
}

inline StateDerivative derivative(const VehicleState& s, double u, const VehicleParams& p) {
    if (!std::isfinite(s.position) || !std::isfinite(s.velocity) ||
        !std::isfinite(s.acceleration) || !std::isfinite(u)) {
        throw NumericError("derivative: non-finite state or input");
    }
    return {s.velocity, s.acceleration, model_jerk(s.acceleration, u, p)};
}

// One classical RK4 step of length dt. `u_of` maps elapsed time within the
// step (0, dt/2, dt) to the input; the mode is re-resolved at every stage.
// The returned state carries u_of(dt) and its mode.
template <typename InputFn>
VehicleState integrate_step(const VehicleState& s, InputFn&& u_of, double dt, const VehicleParams& p) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw ConfigError("integrate_step: dt must be > 0", "dt");
    }
    const double u0 = u_of(0.0);
    const double um = u_of(0.5 * dt);
    const double u1 = u_of(dt);

    auto offset = [&s](const StateDerivative& k, double h) {
        VehicleState out = s;
        out.position += h * k.d_position;
        out.velocity += h * k.d_velocity;
        out.acceleration += h * k.d_acceleration;
        return out;
    };

    const StateDerivative k1 = derivative(s, u0, p);
    const StateDerivative k2 = derivative(offset(k1, 0.5 * dt), um, p);
    const StateDerivative k3 = derivative(offset(k2, 0.5 * dt), um, p);
    const StateDerivative k4 = derivative(offset(k3, dt), u1, p);

    VehicleState next = s;
    next.position += dt / 6.0 * (k1.d_position + 2.0 * k2.d_position + 2.0 * k3.d_position + k4.d_position);
    next.velocity += dt / 6.0 * (k1.d_velocity + 2.0 * k2.d_velocity + 2.0 * k3.d_velocity + k4.d_velocity);
    next.acceleration += dt / 6.0 * (k1.d_acceleration + 2.0 * k2.d_acceleration +
                                     2.0 * k3.d_acceleration + k4.d_acceleration);
    next.control_input = u1;
    next.mode = mode_of(u1, p.deadband);
    return next;
}

// Constant input held over the step.
inline VehicleState integrate_step(const VehicleState& s, double u, double dt, const VehicleParams& p) {
    return integrate_step(s, [u](double) { return u; }, dt, p);
}

} // namespace evcacc
