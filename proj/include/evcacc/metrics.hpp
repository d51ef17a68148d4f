#pragma once

// Evaluation metrics over simulation logs: signal norms, the velocity-norm
// string-stability ratio, spacing RMSE and integrated energy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "evcacc/energy_model.hpp"
#include "evcacc/errors.hpp"
#include "evcacc/platoon_sim.hpp"

namespace evcacc {

enum class NormOrder { L2, Infinity };

// Trapezoidal integral on a uniform grid.
inline double trapezoid(std::span<const double> s, double dt) {
    if (s.size() < 2) return 0.0;
    double sum = 0.5 * (s.front() + s.back());
    for (std::size_t k = 1; k + 1 < s.size(); ++k) sum += s[k];
    return sum * dt;
}

inline double signal_norm(std::span<const double> s, double dt, NormOrder order) {
    if (s.empty()) throw DomainError("signal_norm: empty series");
    if (order == NormOrder::Infinity) {
        double m = 0.0;
        for (double x : s) m = std::max(m, std::abs(x));
        return m;
    }
    std::vector<double> sq(s.size());
    std::transform(s.begin(), s.end(), sq.begin(), [](double x) { return x * x; });
    return std::sqrt(trapezoid(sq, dt));
}

struct StringStabilityOptions {
    bool subtract_initial_speed = false; // off: ratio of raw velocity norms
    double monotone_tolerance = 1e-9;
};

struct StringStabilityReport {
    std::vector<double> omega; // omega[j] belongs to vehicle j + 1
    double platoon_average = 0.0;
    bool monotone_nonincreasing = true;
};

inline StringStabilityReport string_stability_criterion(const SimulationLog& log,
                                                        const StringStabilityOptions& opt = {}) {
    const std::size_t n = log.vehicles.size();
    if (n < 2) throw DomainError("string_stability_criterion: needs at least two vehicles");

    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = log.vehicles[i].v;
        if (opt.subtract_initial_speed && !v.empty()) {
            const double v0 = v.front();
            for (double& x : v) x -= v0;
        }
        norms[i] = signal_norm(v, log.dt, NormOrder::L2);
    }

    StringStabilityReport r;
    for (std::size_t i = 1; i < n; ++i) {
        if (norms[i - 1] == 0.0) {
            throw DomainError("string_stability_criterion: velocity norm of vehicle " + std::to_string(i - 1) +
                              " is zero");
        }
        r.omega.push_back(norms[i] / norms[i - 1]);
    }
    r.platoon_average = std::accumulate(r.omega.begin(), r.omega.end(), 0.0) / static_cast<double>(r.omega.size());
    for (std::size_t j = 1; j < r.omega.size(); ++j) {
        if (r.omega[j] > r.omega[j - 1] + opt.monotone_tolerance) r.monotone_nonincreasing = false;
    }
    return r;
}

struct RmseReport {
    std::vector<double> per_follower; // per_follower[j] belongs to vehicle j + 1
    double platoon_average = 0.0;
};

inline double rms(std::span<const double> s) {
    if (s.empty()) return 0.0;
    double sum = 0.0;
    for (double x : s) sum += x * x;
    return std::sqrt(sum / static_cast<double>(s.size()));
}

inline RmseReport distance_rmse(const SimulationLog& log) {
    RmseReport r;
    for (const VehicleTrace& tr : log.vehicles) {
        if (tr.has_errors) r.per_follower.push_back(rms(tr.e1));
    }
    if (!r.per_follower.empty()) {
        r.platoon_average = std::accumulate(r.per_follower.begin(), r.per_follower.end(), 0.0) /
                            static_cast<double>(r.per_follower.size());
    }
    return r;
}

struct EnergyReport {
    std::vector<double> consumed;  // J, net (regen offsets consumption)
    std::vector<double> recovered; // J, >= 0
    double platoon_total = 0.0;
    double platoon_average = 0.0;
};

inline std::vector<double> power_series(const VehicleTrace& tr, const EnergyModelParams& p) {
    std::vector<double> out(tr.v.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = instantaneous_power(tr.x[k], tr.v[k], tr.a[k], p);
    return out;
}

inline EnergyReport total_energy(const SimulationLog& log, const EnergyModelParams& p) {
    EnergyReport r;
    for (const VehicleTrace& tr : log.vehicles) {
        const std::vector<double> power = power_series(tr, p);
        std::vector<double> negative(power.size());
        std::transform(power.begin(), power.end(), negative.begin(), [](double w) { return std::min(w, 0.0); });
        r.consumed.push_back(trapezoid(power, log.dt));
        r.recovered.push_back(-trapezoid(negative, log.dt));
    }
    r.platoon_total = std::accumulate(r.consumed.begin(), r.consumed.end(), 0.0);
    if (!r.consumed.empty()) r.platoon_average = r.platoon_total / static_cast<double>(r.consumed.size());
    return r;
}

inline EnergyReport total_energy(const SimulationLog& log) { return total_energy(log, log.config.energy); }

// Smallest bumper-to-bumper gap behind each predecessor; entry j belongs to
// vehicle j + 1.
inline std::vector<double> minimum_gaps(const SimulationLog& log) {
    std::vector<double> out;
    for (std::size_t i = 1; i < log.vehicles.size(); ++i) {
        const double length = log.config.params.at(i - 1).length;
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < log.time.size(); ++k) {
            g = std::min(g, log.vehicles[i - 1].x[k] - log.vehicles[i].x[k] - length);
        }
        out.push_back(g);
    }
    return out;
}

} // namespace evcacc
