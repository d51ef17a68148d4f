#pragma once

// Runtime audits of a simulated run against the closed-loop stability
// argument: Lyapunov decay along logged errors and the minimum dwell time
// between input sign changes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evcacc/errors.hpp"
#include "evcacc/gain_conditions.hpp"
#include "evcacc/platoon_sim.hpp"

namespace evcacc {

struct DecayViolation {
    double time = 0.0;
    double derivative = 0.0; // centered-difference estimate of V'
    double bound = 0.0;      // -lambda V + tolerance
};

struct LyapunovTrace {
    std::vector<double> time;
    std::vector<double> value;
    double lambda = 0.0;
    double tolerance = 0.0;
    std::vector<DecayViolation> violations;
};

struct DecayOptions {
    double relative_tolerance = 1e-6; // tolerance = relative_tolerance * max V in the window
    // Runs spanning less than this many steps whose stencils straddle a mode
    // change of the vehicle or its predecessor are dropped.
    double artifact_span_steps = 2.0;
    std::optional<double> lambda; // rate to check against instead of lambda_bound
};

// Checks V' <= -lambda V on follower `vehicle` over [window_start, window_end].
inline LyapunovTrace verify_decay(const SimulationLog& log, std::size_t vehicle, const ControllerGains& gains,
                                  const VehicleParams& params, double window_start, double window_end,
                                  const DecayOptions& opt = {}) {
    if (vehicle == 0 || vehicle >= log.vehicles.size() || !log.vehicles[vehicle].has_errors) {
        throw DomainError("verify_decay: vehicle " + std::to_string(vehicle) + " has no error series");
    }
    if (log.time.empty() || window_start < log.time.front() - 1e-12 ||
        window_end > log.time.back() + 1e-12 || !(window_end > window_start)) {
        throw DomainError("verify_decay: window lies outside the log");
    }

    const VehicleTrace& tr = log.vehicles[vehicle];
    const double dt = log.dt;
    const auto first = static_cast<std::size_t>(std::ceil((window_start - log.time.front()) / dt - 1e-9));
    const auto last = std::min(log.time.size() - 1,
                               static_cast<std::size_t>(std::floor((window_end - log.time.front()) / dt + 1e-9)));

    LyapunovTrace out;
    out.lambda = opt.lambda ? *opt.lambda : lambda_bound(gains, params);
    for (std::size_t k = first; k <= last; ++k) {
        out.time.push_back(log.time[k]);
        out.value.push_back(lyapunov_value(tr.e1[k], tr.r1[k], tr.r2[k]));
    }
    const double vmax = out.value.empty() ? 0.0 : *std::max_element(out.value.begin(), out.value.end());
    out.tolerance = opt.relative_tolerance * vmax;

    const VehicleTrace& pred = log.vehicles[vehicle - 1];
    auto switches_in = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo + 1; k <= hi; ++k) {
            if (tr.mode[k] != tr.mode[k - 1] || pred.mode[k] != pred.mode[k - 1]) return true;
        }
        return false;
    };

    std::vector<DecayViolation> run;
    std::size_t run_first = 0, run_last = 0;
    auto flush = [&] {
        if (run.empty()) return;
        const bool short_run = static_cast<double>(run_last - run_first) < opt.artifact_span_steps;
        const bool straddles = switches_in(first + run_first - 1, first + run_last + 1);
        if (!(short_run && straddles)) out.violations.insert(out.violations.end(), run.begin(), run.end());
        run.clear();
    };
    for (std::size_t j = 1; j + 1 < out.value.size(); ++j) {
        const double dv = (out.value[j + 1] - out.value[j - 1]) / (2.0 * dt);
        const double bound = -out.lambda * out.value[j] + out.tolerance;
        if (dv > bound) {
            if (run.empty()) run_first = j;
            run_last = j;
            run.push_back({out.time[j], dv, bound});
        } else {
            flush();
        }
    }
    flush();
    return out;
}

struct DwellReport {
    std::size_t switch_count = 0;
    double min_interval = std::numeric_limits<double>::infinity(); // s, between consecutive switches
    double delta_hat = 0.0;      // smallest peak |u| between consecutive switches
    double lipschitz_hat = 0.0;  // max |u'| by finite differences
    double kappa_min_estimate = 0.0; // 2 delta_hat / lipschitz_hat
    std::vector<double> switch_times;
};

// A switch is a sign change of u quantized by the deadband; samples inside
// the deadband carry no sign and do not break a run.
inline DwellReport dwell_time_report(std::span<const double> u, double dt, double deadband) {
    DwellReport r;
    for (std::size_t k = 1; k < u.size(); ++k) {
        r.lipschitz_hat = std::max(r.lipschitz_hat, std::abs(u[k] - u[k - 1]) / dt);
    }

    int sign = 0;
    double peak = 0.0;
    double smallest_peak = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const int s = u[k] > deadband ? 1 : (u[k] < -deadband ? -1 : 0);
        if (s != 0 && sign != 0 && s != sign) {
            const double t = dt * static_cast<double>(k);
            if (!r.switch_times.empty()) {
                r.min_interval = std::min(r.min_interval, t - r.switch_times.back());
                smallest_peak = std::min(smallest_peak, peak);
            }
            r.switch_times.push_back(t);
            peak = 0.0;
        }
        if (s != 0) sign = s;
        peak = std::max(peak, std::abs(u[k]));
    }
    r.switch_count = r.switch_times.size();
    if (r.switch_count >= 2 && r.lipschitz_hat > 0) {
        r.delta_hat = smallest_peak;
        r.kappa_min_estimate = 2.0 * r.delta_hat / r.lipschitz_hat;
    }
    return r;
}

} // namespace evcacc
