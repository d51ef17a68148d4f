#pragma once

#include <cmath>
#include <functional>

#include "evcacc/errors.hpp"
#include "evcacc/ev_dynamics.hpp"

namespace evcacc {

// Road-load power model. Positive power is drawn from the battery; negative
// power is braking power of which only regen_efficiency is recovered.
struct EnergyModelParams {
    double mass = 2000.0;            // kg
    double drag_area_coeff = 0.46181; // kg/m, 0.5 * rho * Cd * A
    double rolling_coeff = 0.01;
    double gravity = 9.81;           // m/s^2
    double regen_efficiency = 0.60;
    double accessory_power = 0.0;    // W, constant hotel load
    std::function<double(double)> grade; // position [m] -> road grade [rad]; empty means flat

    void validate() const {
        if (!(mass > 0)) throw ConfigError("energy.mass must be > 0", "energy.mass");
        if (!(drag_area_coeff >= 0)) {
            throw ConfigError("energy.drag_area_coeff must be >= 0", "energy.drag_area_coeff");
        }
        if (!(rolling_coeff >= 0)) throw ConfigError("energy.rolling_coeff must be >= 0", "energy.rolling_coeff");
        if (!(gravity > 0)) throw ConfigError("energy.gravity must be > 0", "energy.gravity");
        if (!(regen_efficiency >= 0 && regen_efficiency <= 1)) {
            throw ConfigError("energy.regen_efficiency must lie in [0, 1]", "energy.regen_efficiency");
        }
        if (!std::isfinite(accessory_power)) {
            throw ConfigError("energy.accessory_power must be finite", "energy.accessory_power");
        }
    }
};

inline double instantaneous_power(double position, double velocity, double acceleration,
                                  const EnergyModelParams& p) {
    const double theta = p.grade ? p.grade(position) : 0.0;
    const double force = p.drag_area_coeff * velocity * velocity +
                         p.rolling_coeff * p.mass * p.gravity * std::cos(theta) +
                         p.mass * p.gravity * std::sin(theta) + p.mass * acceleration;
    const double raw = force * velocity;
    const double traction = raw >= 0 ? raw : p.regen_efficiency * raw;
    return traction + p.accessory_power;
}

inline double instantaneous_power(const VehicleState& s, const EnergyModelParams& p) {
    return instantaneous_power(s.position, s.velocity, s.acceleration, p);
}

} // namespace evcacc
