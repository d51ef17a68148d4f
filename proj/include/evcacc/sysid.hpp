#pragma once

// Step-response identification of the two-mode first-order acceleration lag
//
//   a(t) = (beta / gamma) u0 (1 - exp(-gamma t))
//
// Trials are normalized to a unit step, averaged, and fitted by a 1-D
// golden-section search on gamma with beta solved in closed form.

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "evcacc/errors.hpp"
#include "evcacc/ev_dynamics.hpp"

namespace evcacc {

enum class TrialMode { Motoring, Regen };

inline const char* to_string(TrialMode m) { return m == TrialMode::Motoring ? "motoring" : "regen"; }

struct StepTrial {
    double command_magnitude = 1.0; // m/s^2, signed step size
    double dt = 0.01;               // s, sample spacing; samples start at t = 0
    std::vector<double> samples;    // measured acceleration
    TrialMode mode = TrialMode::Motoring;
    bool normalized = false;        // samples are per unit command, magnitude is 1

    void validate() const {
        if (command_magnitude == 0.0 || !std::isfinite(command_magnitude)) {
            throw DomainError("step trial: command magnitude must be nonzero");
        }
        if (!normalized && (mode == TrialMode::Motoring) != (command_magnitude > 0)) {
            throw DomainError("step trial: command sign does not match its mode");
        }
        if (!(dt > 0)) throw DomainError("step trial: sample spacing must be > 0");
        if (samples.empty()) throw DomainError("step trial: no samples");
    }
};

struct ModeFit {
    double gamma = 0.0;
    double beta = 0.0;
    double residual_rms = 0.0;
};

inline StepTrial average_trials(const std::vector<StepTrial>& trials) {
    if (trials.empty()) throw DomainError("average_trials: no trials");
    const StepTrial& ref = trials.front();
    StepTrial out;
    out.command_magnitude = 1.0;
    out.dt = ref.dt;
    out.mode = ref.mode;
    out.normalized = true;
    out.samples.assign(ref.samples.size(), 0.0);
    for (const StepTrial& t : trials) {
        t.validate();
        if (t.mode != ref.mode) throw DomainError("average_trials: trials mix modes");
        if (t.samples.size() != ref.samples.size() || std::abs(t.dt - ref.dt) > 1e-12 * ref.dt) {
            throw DomainError("average_trials: trials are on different sampling grids");
        }
        for (std::size_t k = 0; k < t.samples.size(); ++k) out.samples[k] += t.samples[k] / t.command_magnitude;
    }
    for (double& s : out.samples) s /= static_cast<double>(trials.size());
    return out;
}

struct FitOptions {
    double gamma_lo = 0.05; // 1/s
    double gamma_hi = 5.0;  // 1/s
    double tolerance = 1e-11;
    std::size_t max_iterations = 500;
};

namespace detail {

// Least-squares beta for a fixed gamma and the resulting sum of squares.
struct BetaSolve {
    double beta;
    double sse;
};

inline BetaSolve solve_beta(const std::vector<double>& y, double dt, double gamma) {
    double gy = 0.0, gg = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = dt * static_cast<double>(k);
        const double g = -std::expm1(-gamma * t) / gamma;
        gy += g * y[k];
        gg += g * g;
    }
    const double beta = gg > 0 ? gy / gg : 0.0;
    double sse = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = dt * static_cast<double>(k);
        const double r = y[k] - beta * (-std::expm1(-gamma * t) / gamma);
        sse += r * r;
    }
    return {beta, sse};
}

} // namespace detail

// Expects a unit-normalized response (as produced by average_trials).
inline ModeFit fit_first_order(const StepTrial& averaged, const FitOptions& opt = {}) {
    if (averaged.samples.size() < 3) throw FitError("fit_first_order: need at least three samples");
    if (!(opt.gamma_lo > 0) || !(opt.gamma_hi > opt.gamma_lo)) throw FitError("fit_first_order: invalid bracket");
    const std::vector<double>& y = averaged.samples;
    const double dt = averaged.dt;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = opt.gamma_lo, hi = opt.gamma_hi;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = detail::solve_beta(y, dt, x1).sse;
    double f2 = detail::solve_beta(y, dt, x2).sse;
    std::size_t it = 0;
    for (; it < opt.max_iterations && (hi - lo) > opt.tolerance * (1.0 + std::abs(lo)); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = detail::solve_beta(y, dt, x1).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = detail::solve_beta(y, dt, x2).sse;
        }
    }
    const double gamma = 0.5 * (lo + hi);
    const double edge = 1e-6 * (opt.gamma_hi - opt.gamma_lo);
    if (it == opt.max_iterations || gamma - opt.gamma_lo < edge || opt.gamma_hi - gamma < edge) {
        throw FitError("fit_first_order: no interior minimum in gamma bracket [" + std::to_string(opt.gamma_lo) +
                       ", " + std::to_string(opt.gamma_hi) + "], search ended at gamma=" + std::to_string(gamma) +
                       " after " + std::to_string(it) + " iterations");
    }

    const detail::BetaSolve best = detail::solve_beta(y, dt, gamma);
    const double duration = dt * static_cast<double>(y.size() - 1);
    if (duration < 3.0 / gamma) {
        throw FitError("fit_first_order: record of " + std::to_string(duration) +
                       " s is shorter than three time constants (" + std::to_string(3.0 / gamma) + " s)");
    }
    if (!(best.beta > 0)) throw FitError("fit_first_order: fitted beta is not positive");
    return {gamma, best.beta, std::sqrt(best.sse / static_cast<double>(y.size()))};
}

// Step from rest simulated with the vehicle model; the sign of the command
// selects the mode.
inline StepTrial synthesize_step_trial(const VehicleParams& p, double command, double dt, double duration) {
    if (command == 0.0) throw DomainError("synthesize_step_trial: command must be nonzero");
    if (!(dt > 0) || !(duration > dt)) throw DomainError("synthesize_step_trial: bad grid");
    StepTrial trial;
    trial.command_magnitude = command;
    trial.dt = dt;
    trial.mode = command > 0 ? TrialMode::Motoring : TrialMode::Regen;
    const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
    VehicleState s;
    s.control_input = command;
    trial.samples.reserve(n + 1);
    trial.samples.push_back(s.acceleration);
    for (std::size_t k = 0; k < n; ++k) {
        s = integrate_step(s, command, dt, p);
        trial.samples.push_back(s.acceleration);
    }
    return trial;
}

// sample *= 1 + level * N(0, 1)
template <typename Rng>
void add_multiplicative_noise(StepTrial& trial, double level, Rng& rng) {
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double& s : trial.samples) s *= 1.0 + level * noise(rng);
}

} // namespace evcacc
