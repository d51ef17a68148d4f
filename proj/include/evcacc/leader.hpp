#pragma once

// Leader input generation: either a piecewise-constant desired acceleration
// or tracking of a speed trace (drive cycle).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evcacc/errors.hpp"
#include "evcacc/ev_dynamics.hpp"

namespace evcacc {

struct AccelSegment {
    double start = 0.0; // s
    double accel = 0.0; // m/s^2
};

struct PiecewiseAcceleration {
    std::vector<AccelSegment> segments;

    void validate() const {
        if (segments.empty()) throw ConfigError("leader.segments must not be empty", "leader.segments");
        for (std::size_t k = 0; k < segments.size(); ++k) {
            if (!std::isfinite(segments[k].start) || !std::isfinite(segments[k].accel)) {
                throw ConfigError("leader.segments must be finite", "leader.segments");
            }
            if (k > 0 && !(segments[k].start > segments[k - 1].start)) {
                throw ConfigError("leader.segments start times must be strictly increasing", "leader.segments");
            }
        }
    }

    double at(double t) const {
        // Before the first segment the first value applies; past the end the
        // last one is held.
        auto it = std::upper_bound(segments.begin(), segments.end(), t,
                                   [](double v, const AccelSegment& s) { return v < s.start; });
        if (it == segments.begin()) return segments.front().accel;
        return std::prev(it)->accel;
    }

    // Start time of the last segment whose value differs from its predecessor.
    double last_change() const {
        for (std::size_t k = segments.size(); k-- > 1;) {
            if (segments[k].accel != segments[k - 1].accel) return segments[k].start;
        }
        return segments.empty() ? 0.0 : segments.front().start;
    }
};

// Speed trace with a smoothed reference acceleration: centered differences on
// a fine grid followed by a centered moving average.
class SpeedTrace {
public:
    SpeedTrace() = default;

    SpeedTrace(std::vector<double> times, std::vector<double> speeds, double speed_gain = 1.0,
               double smoothing_window = 0.5, double grid_step = 0.01)
        : times_(std::move(times)), speeds_(std::move(speeds)), speed_gain_(speed_gain),
          smoothing_window_(smoothing_window), grid_step_(grid_step) {
        validate();
        build_reference_acceleration();
    }

    void validate() const {
        if (times_.size() != speeds_.size()) {
            throw ConfigError("speed trace: time and speed columns differ in length", "leader.trace");
        }
        if (times_.size() < 2) throw ConfigError("speed trace needs at least two samples", "leader.trace");
        for (std::size_t k = 0; k < times_.size(); ++k) {
            if (!std::isfinite(times_[k]) || !std::isfinite(speeds_[k])) {
                throw ConfigError("speed trace contains non-finite values", "leader.trace");
            }
            if (speeds_[k] < 0) throw ConfigError("speed trace speeds must be >= 0", "leader.trace");
            if (k > 0 && !(times_[k] > times_[k - 1])) {
                throw ConfigError("speed trace times must be strictly increasing", "leader.trace");
            }
        }
        if (!(speed_gain_ >= 0) || !std::isfinite(speed_gain_)) {
            throw ConfigError("leader.speed_gain must be >= 0", "leader.speed_gain");
        }
        if (!(smoothing_window_ >= 0)) throw ConfigError("leader.smoothing_window must be >= 0", "leader.smoothing_window");
        if (!(grid_step_ > 0)) throw ConfigError("speed trace grid step must be > 0", "leader.grid_step");
    }

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& speeds() const { return speeds_; }
    double speed_gain() const { return speed_gain_; }
    double smoothing_window() const { return smoothing_window_; }
    double grid_step() const { return grid_step_; }
    double start_time() const { return times_.front(); }
    double end_time() const { return times_.back(); }

    double speed(double t) const {
        if (t <= times_.front()) return speeds_.front();
        if (t >= times_.back()) return speeds_.back();
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - times_.begin());
        const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
        return speeds_[k - 1] + w * (speeds_[k] - speeds_[k - 1]);
    }

    // Zero outside the trace, where the reference speed is held.
    double acceleration(double t) const {
        if (t < times_.front() || t > times_.back()) return 0.0;
        const double pos = (t - times_.front()) / grid_step_;
        const std::size_t k = std::min(static_cast<std::size_t>(pos), accel_.size() - 1);
        if (k + 1 >= accel_.size()) return accel_.back();
        const double w = pos - static_cast<double>(k);
        return accel_[k] + w * (accel_[k + 1] - accel_[k]);
    }

private:
    void build_reference_acceleration() {
        const double span = times_.back() - times_.front();
        const std::size_t n = static_cast<std::size_t>(std::floor(span / grid_step_ + 1e-9)) + 1;
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = speed(times_.front() + grid_step_ * static_cast<double>(k));

        std::vector<double> raw(n, 0.0);
        if (n >= 2) {
            raw[0] = (v[1] - v[0]) / grid_step_;
            raw[n - 1] = (v[n - 1] - v[n - 2]) / grid_step_;
            for (std::size_t k = 1; k + 1 < n; ++k) raw[k] = (v[k + 1] - v[k - 1]) / (2.0 * grid_step_);
        }

        const std::size_t half = static_cast<std::size_t>(std::lround(0.5 * smoothing_window_ / grid_step_));
        std::vector<double> prefix(n + 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + raw[k];
        accel_.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t lo = k >= half ? k - half : 0;
            const std::size_t hi = std::min(n - 1, k + half);
            accel_[k] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
        }
    }

    std::vector<double> times_;
    std::vector<double> speeds_;
    double speed_gain_ = 1.0;       // 1/s
    double smoothing_window_ = 0.5; // s
    double grid_step_ = 0.01;       // s
    std::vector<double> accel_;
};

using LeaderProfile = std::variant<PiecewiseAcceleration, SpeedTrace>;

inline double leader_command(const LeaderProfile& profile, double t, const VehicleState& leader) {
    if (const auto* pw = std::get_if<PiecewiseAcceleration>(&profile)) return pw->at(t);
    const auto& trace = std::get<SpeedTrace>(profile);
    return trace.speed_gain() * (trace.speed(t) - leader.velocity) + trace.acceleration(t);
}

// Time after which the leader input stops changing (for convergence windows).
inline double leader_last_change(const LeaderProfile& profile) {
    if (const auto* pw = std::get_if<PiecewiseAcceleration>(&profile)) return pw->last_change();
    return std::get<SpeedTrace>(profile).end_time();
}

} // namespace evcacc
