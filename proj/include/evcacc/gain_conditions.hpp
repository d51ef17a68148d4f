#pragma once

// Sufficient conditions on the CACC gains and the Lyapunov decay-rate bound
// they imply.

#include <algorithm>
#include <cmath>
#include <string>

#include "evcacc/cacc_control.hpp"
#include "evcacc/errors.hpp"
#include "evcacc/ev_dynamics.hpp"

namespace evcacc {

struct GainCheckReport {
    double margin_alpha2 = 0.0; // alpha2 - epsilon1 / 2
    double margin_alpha1 = 0.0; // alpha1 - 1 / (2 epsilon1)
    double margin_c = 0.0;      // C
    bool condition_alpha2 = false;
    bool condition_alpha1 = false;
    bool condition_c = false;
    bool overall = false;
};

inline GainCheckReport check_gain_conditions(const ControllerGains& g) {
    if (!(g.epsilon1 > 0) || !std::isfinite(g.epsilon1)) {
        throw DomainError("epsilon1 must be > 0, got " + std::to_string(g.epsilon1));
    }
    GainCheckReport r;
    r.margin_alpha2 = g.alpha2 - g.epsilon1 / 2.0;
    r.margin_alpha1 = g.alpha1 - 1.0 / (2.0 * g.epsilon1);
    r.margin_c = g.c_gain;
    r.condition_alpha2 = r.margin_alpha2 > 0;
    r.condition_alpha1 = r.margin_alpha1 > 0;
    r.condition_c = r.margin_c > 0;
    r.overall = r.condition_alpha2 && r.condition_alpha1 && r.condition_c;
    return r;
}

// V = (e1^2 + r1^2 + r2^2) / 2
inline double lyapunov_value(double e1, double r1, double r2) {
    return 0.5 * (e1 * e1 + r1 * r1 + r2 * r2);
}

// Lower bound on beta(u) over both modes, written as in the proof:
// ((b1 + b2) - |b1 - b2|) / 2, which is min(b1, b2).
inline double beta_lower_bound(const VehicleParams& p) {
    return 0.5 * ((p.beta_accel + p.beta_decel) - std::abs(p.beta_accel - p.beta_decel));
}

inline double lambda_bound(const ControllerGains& g, const VehicleParams& p) {
    const GainCheckReport r = check_gain_conditions(g);
    if (!r.overall) throw DomainError("lambda_bound: gains violate the sufficient conditions");
    return std::min({r.margin_alpha2, r.margin_alpha1, g.c_gain * beta_lower_bound(p)});
}

} // namespace evcacc
