#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evcacc/metrics.hpp"

using namespace evcacc;

namespace {

SimulationLog log_from_velocities(const std::vector<std::vector<double>>& v, double dt) {
    SimulationLog log;
    log.dt = dt;
    for (std::size_t k = 0; k < v.front().size(); ++k) log.time.push_back(dt * static_cast<double>(k));
    for (std::size_t i = 0; i < v.size(); ++i) {
        VehicleTrace tr;
        tr.v = v[i];
        tr.x.assign(v[i].size(), 0.0);
        tr.a.assign(v[i].size(), 0.0);
        tr.has_errors = i > 0;
        if (tr.has_errors) tr.e1.assign(v[i].size(), 0.0);
        log.vehicles.push_back(tr);
    }
    log.config.params.assign(v.size(), VehicleParams{});
    return log;
}

} // namespace

TEST(SignalNorm, Examples) {
    const std::vector<double> two(101, 2.0);
    EXPECT_NEAR(signal_norm(two, 0.01, NormOrder::L2), 2.0, 1e-12);
    const std::vector<double> zero(10, 0.0);
    EXPECT_EQ(signal_norm(zero, 0.1, NormOrder::L2), 0.0);
    EXPECT_EQ(signal_norm(zero, 0.1, NormOrder::Infinity), 0.0);
    const std::vector<double> pts{3.0, -4.0};
    EXPECT_EQ(signal_norm(pts, 1.0, NormOrder::Infinity), 4.0);
    EXPECT_THROW(signal_norm(std::vector<double>{}, 0.1, NormOrder::L2), DomainError);
}

TEST(SignalNorm, HomogeneityAndTriangleInequality) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> r(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(200), b(200), sum(200), scaled(200);
        const double alpha = r(rng);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = r(rng);
            b[k] = r(rng);
            sum[k] = a[k] + b[k];
            scaled[k] = alpha * a[k];
        }
        const double na = signal_norm(a, 0.05, NormOrder::L2);
        EXPECT_NEAR(signal_norm(scaled, 0.05, NormOrder::L2), std::abs(alpha) * na, 1e-12 * (1.0 + na));
        EXPECT_LE(signal_norm(sum, 0.05, NormOrder::L2),
                  na + signal_norm(b, 0.05, NormOrder::L2) + 1e-12);
    }
}

TEST(StringStability, ExamplesAndAverage) {
    const std::vector<double> v{0.0, 1.0, 2.0, 3.0, 2.0};
    auto r = string_stability_criterion(log_from_velocities({v, v, v}, 0.1));
    for (double w : r.omega) EXPECT_EQ(w, 1.0);
    EXPECT_TRUE(r.monotone_nonincreasing);

    r = string_stability_criterion(log_from_velocities({v, std::vector<double>(5, 0.0)}, 0.1));
    EXPECT_EQ(r.omega[0], 0.0);

    const std::vector<double> half{0.0, 0.5, 1.0, 1.5, 1.0};
    const std::vector<double> more{0.0, 0.45, 0.9, 1.35, 0.9};
    r = string_stability_criterion(log_from_velocities({v, half, more}, 0.1));
    EXPECT_NEAR(r.omega[0], 0.5, 1e-15);
    EXPECT_NEAR(r.omega[1], 0.9, 1e-15);
    EXPECT_NEAR(r.platoon_average, 0.7, 1e-15);
    EXPECT_FALSE(r.monotone_nonincreasing);
}

TEST(StringStability, ZeroPredecessorNormNamesVehicle) {
    const std::vector<double> z(5, 0.0), v{0.0, 1.0, 1.0, 1.0, 1.0};
    try {
        string_stability_criterion(log_from_velocities({v, z, v}, 0.1));
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("vehicle 1"), std::string::npos);
    }
    EXPECT_THROW(string_stability_criterion(log_from_velocities({v}, 0.1)), DomainError);
}

TEST(StringStability, SubtractInitialSpeedOption) {
    const std::vector<double> a{10.0, 11.0, 12.0, 11.0}, b{10.0, 10.5, 11.0, 10.5};
    StringStabilityOptions opt;
    opt.subtract_initial_speed = true;
    const auto r = string_stability_criterion(log_from_velocities({a, b}, 1.0), opt);
    EXPECT_NEAR(r.omega[0], 0.5, 1e-15);
    const auto raw = string_stability_criterion(log_from_velocities({a, b}, 1.0));
    EXPECT_GT(raw.omega[0], 0.9);
}

TEST(StringStability, InvariantUnderGridRefinement) {
    ScenarioConfig cfg;
    cfg.params.assign(cfg.n_vehicles, VehicleParams{});
    cfg.leader = SpeedTrace({0.0, 5.0, 15.0, 25.0, 35.0, 45.0}, {0.0, 0.0, 12.0, 12.0, 0.0, 0.0});
    cfg.duration = 45.0;
    const auto coarse = string_stability_criterion(run_scenario(cfg));
    cfg.dt = 0.005;
    const auto fine = string_stability_criterion(run_scenario(cfg));
    for (std::size_t j = 0; j < coarse.omega.size(); ++j) EXPECT_NEAR(coarse.omega[j], fine.omega[j], 1e-6);
}

TEST(DistanceRmse, Examples) {
    SimulationLog log = log_from_velocities({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, 0.1);
    EXPECT_EQ(distance_rmse(log).platoon_average, 0.0);
    log.vehicles[1].e1.assign(3, 0.1);
    log.vehicles[2].e1.assign(3, -0.1);
    const RmseReport r = distance_rmse(log);
    EXPECT_NEAR(r.per_follower[0], 0.1, 1e-15);
    EXPECT_NEAR(r.per_follower[1], 0.1, 1e-15);
    EXPECT_NEAR(r.platoon_average, 0.1, 1e-15);
}

TEST(InstantaneousPower, Examples) {
    EnergyModelParams p;
    EXPECT_EQ(instantaneous_power(0.0, 0.0, 1.0, p), 0.0);
    EXPECT_NEAR(instantaneous_power(0.0, 10.0, 0.0, p), 2423.81, 1e-9);
    EXPECT_NEAR(instantaneous_power(0.0, 10.0, -1.0, p), -10545.714, 1e-9);
}

TEST(InstantaneousPower, GradeAndMonotoneInSpeed) {
    EnergyModelParams p;
    double prev = 0.0;
    for (double v = 0.5; v < 40.0; v += 0.5) {
        const double w = instantaneous_power(0.0, v, 0.0, p);
        EXPECT_GT(w, prev);
        prev = w;
    }
    p.grade = [](double) { return 0.05; };
    const double uphill = instantaneous_power(0.0, 10.0, 0.0, p);
    const double f = p.drag_area_coeff * 100 + p.rolling_coeff * p.mass * p.gravity * std::cos(0.05) +
                     p.mass * p.gravity * std::sin(0.05);
    EXPECT_NEAR(uphill, f * 10.0, 1e-9);
}

TEST(EnergyParams, Invariants) {
    EnergyModelParams p;
    EXPECT_NO_THROW(p.validate());
    p.mass = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = EnergyModelParams{};
    p.regen_efficiency = 1.2;
    EXPECT_THROW(p.validate(), ConfigError);
    p = EnergyModelParams{};
    p.drag_area_coeff = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(TotalEnergy, ConstantAndZeroPower) {
    SimulationLog log = log_from_velocities({std::vector<double>(1001, 0.0)}, 0.01);
    EnergyModelParams p;
    p.accessory_power = 1000.0;
    EXPECT_NEAR(total_energy(log, p).consumed[0], 10000.0, 1e-9);
    p.accessory_power = 0.0;
    EXPECT_EQ(total_energy(log, p).consumed[0], 0.0);
}

TEST(TotalEnergy, RegenBookkeeping) {
    ScenarioConfig cfg;
    cfg.params.assign(cfg.n_vehicles, VehicleParams{});
    cfg.leader = SpeedTrace({0.0, 5.0, 15.0, 25.0, 35.0, 45.0}, {0.0, 0.0, 12.0, 12.0, 0.0, 0.0});
    cfg.duration = 45.0;
    const SimulationLog log = run_scenario(cfg);

    EnergyModelParams none = cfg.energy, full = cfg.energy;
    none.regen_efficiency = 0.0;
    full.regen_efficiency = 1.0;
    const EnergyReport rn = total_energy(log, none), rf = total_energy(log, full);
    const EnergyReport r = total_energy(log);
    for (std::size_t i = 0; i < log.vehicles.size(); ++i) {
        EXPECT_GE(rn.consumed[i], rf.consumed[i]);
        EXPECT_GE(r.recovered[i], 0.0);
        const std::vector<double> pw = power_series(log.vehicles[i], cfg.energy);
        std::vector<double> pos(pw.size());
        for (std::size_t k = 0; k < pw.size(); ++k) pos[k] = std::max(pw[k], 0.0);
        EXPECT_NEAR(r.consumed[i] + r.recovered[i], trapezoid(pos, log.dt), 1e-6);
        EXPECT_EQ(pw, log.vehicles[i].power);
    }
    double total = 0.0;
    for (double c : r.consumed) total += c;
    EXPECT_NEAR(r.platoon_total, total, 1e-9);
    EXPECT_NEAR(r.platoon_average, total / 5.0, 1e-9);
}
