#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "evcacc/metrics.hpp"
#include "evcacc/platoon_sim.hpp"

using namespace evcacc;

namespace {

ScenarioConfig step_scenario(std::size_t n = 5, double dt = 0.01) {
    ScenarioConfig cfg;
    cfg.n_vehicles = n;
    cfg.dt = dt;
    cfg.duration = 120.0;
    cfg.params.assign(n, VehicleParams{});
    cfg.leader = PiecewiseAcceleration{{{0.0, 0.0}, {5.0, 1.0}, {15.0, 0.0}, {30.0, -0.5}, {40.0, 0.0}}};
    return cfg;
}

double max_abs(const std::vector<double>& s, std::size_t from = 0) {
    double m = 0.0;
    for (std::size_t k = from; k < s.size(); ++k) m = std::max(m, std::abs(s[k]));
    return m;
}

} // namespace

TEST(LeaderCommand, PiecewiseLookupAndHold) {
    const PiecewiseAcceleration pw{{{0.0, 0.5}, {10.0, 0.0}}};
    EXPECT_EQ(leader_command(pw, 5.0, VehicleState{}), 0.5);
    EXPECT_EQ(leader_command(pw, 10.0, VehicleState{}), 0.0);
    EXPECT_EQ(leader_command(pw, 1e6, VehicleState{}), 0.0);
    EXPECT_EQ(pw.last_change(), 10.0);
}

TEST(LeaderCommand, SpeedTraceTracking) {
    const SpeedTrace tr({0.0, 1.0}, {0.0, 2.0});
    VehicleState leader;
    leader.velocity = 1.0;
    EXPECT_NEAR(leader_command(tr, 0.5, leader), 2.0, 1e-9);
    // Speed error feeds back with gain 1.
    leader.velocity = 0.5;
    EXPECT_NEAR(leader_command(tr, 0.5, leader), 2.5, 1e-9);
    // Past the end the last speed is held with zero feed-forward.
    leader.velocity = 2.0;
    EXPECT_EQ(leader_command(tr, 5.0, leader), 0.0);
}

TEST(LeaderProfile, Invariants) {
    EXPECT_THROW((PiecewiseAcceleration{{{0.0, 0.0}, {0.0, 1.0}}}.validate()), ConfigError);
    EXPECT_THROW((PiecewiseAcceleration{}.validate()), ConfigError);
    EXPECT_THROW(SpeedTrace({0.0, 1.0}, {0.0, -1.0}), ConfigError);
    EXPECT_THROW(SpeedTrace({0.0, 0.0}, {0.0, 1.0}), ConfigError);
    EXPECT_THROW(SpeedTrace({0.0}, {0.0}), ConfigError);
}

TEST(InitializePlatoon, Examples) {
    ScenarioConfig cfg;
    cfg.n_vehicles = 2;
    VehicleParams p;
    p.length = 4.7;
    cfg.params.assign(2, p);
    auto s = initialize_platoon(cfg);
    EXPECT_EQ(s[0].position, 0.0);
    EXPECT_NEAR(s[1].position, -9.7, 1e-12);

    cfg.n_vehicles = 1;
    cfg.params.assign(1, p);
    EXPECT_EQ(initialize_platoon(cfg)[0].position, 0.0);

    ScenarioConfig off = step_scenario(2);
    off.initial.offsets = {1.0};
    off.duration = 1.0;
    const SimulationLog log = run_scenario(off);
    EXPECT_NEAR(log.vehicles[1].e1[0], 1.0, 1e-12);

    off.initial.offsets = {-5.5};
    EXPECT_THROW(initialize_platoon(off), ConfigError);
}

TEST(InitializePlatoon, DesiredGapAtSpeed) {
    ScenarioConfig cfg = step_scenario(4);
    cfg.initial.speed = 12.0;
    const auto s = initialize_platoon(cfg);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const VehicleParams& p = cfg.params[i];
        EXPECT_NEAR(s[i - 1].position - s[i].position, cfg.params[i - 1].length + p.standstill + p.headway * 12.0,
                    1e-12);
        EXPECT_EQ(s[i].velocity, 12.0);
    }
}

TEST(RunScenario, LeaderOnlyAtRest) {
    ScenarioConfig cfg;
    cfg.n_vehicles = 1;
    cfg.duration = 10.0;
    cfg.params.assign(1, VehicleParams{});
    const SimulationLog log = run_scenario(cfg);
    ASSERT_EQ(log.vehicles.size(), 1u);
    for (double x : log.vehicles[0].x) EXPECT_EQ(x, 0.0);
    for (double v : log.vehicles[0].v) EXPECT_EQ(v, 0.0);
    for (double a : log.vehicles[0].a) EXPECT_EQ(a, 0.0);
    EXPECT_TRUE(log.vehicles[0].e1.empty());
}

TEST(RunScenario, EquilibriumKeepsErrorsExactlyZero) {
    for (ControllerKind k : {ControllerKind::Lyapunov, ControllerKind::PidBaseline}) {
        ScenarioConfig cfg = step_scenario();
        cfg.controller = k;
        cfg.leader = PiecewiseAcceleration{{{0.0, 0.0}}};
        cfg.duration = 50.0;
        const SimulationLog log = run_scenario(cfg);
        for (std::size_t i = 1; i < log.vehicles.size(); ++i) {
            const VehicleTrace& tr = log.vehicles[i];
            for (const auto* s : {&tr.e1, &tr.e2, &tr.e3, &tr.r1, &tr.r2, &tr.u}) {
                for (double x : *s) ASSERT_EQ(x, 0.0);
            }
        }
    }
}

TEST(RunScenario, StepProfileConvergesAndAttenuates) {
    const ScenarioConfig cfg = step_scenario();
    const SimulationLog log = run_scenario(cfg);
    double prev = 1e9;
    for (std::size_t i = 1; i < log.vehicles.size(); ++i) {
        const double m = max_abs(log.vehicles[i].e1);
        EXPECT_LE(m, prev) << "vehicle " << i;
        prev = m;
        EXPECT_LT(max_abs(log.vehicles[i].e1, 10000), 1e-3);
    }

    // Cross-check against a run with a 10x smaller step.
    ScenarioConfig fine = cfg;
    fine.dt = 0.001;
    const SimulationLog ref = run_scenario(fine);
    double worst = 0.0;
    for (std::size_t k = 0; k < log.samples(); ++k) {
        for (std::size_t i = 1; i < log.vehicles.size(); ++i) {
            worst = std::max(worst, std::abs(log.vehicles[i].e1[k] - ref.vehicles[i].e1[10 * k]));
        }
    }
    EXPECT_LT(worst, 1e-5);
}

TEST(RunScenario, NoCollisionInStepScenario) {
    const SimulationLog log = run_scenario(step_scenario());
    for (double g : minimum_gaps(log)) EXPECT_GT(g, 0.0);
}

TEST(RunScenario, DeterministicBitwise) {
    ScenarioConfig cfg = step_scenario();
    cfg.duration = 60.0;
    const SimulationLog a = run_scenario(cfg);
    const SimulationLog b = run_scenario(cfg);
    for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
        EXPECT_EQ(a.vehicles[i].x, b.vehicles[i].x);
        EXPECT_EQ(a.vehicles[i].u, b.vehicles[i].u);
        EXPECT_EQ(a.vehicles[i].e1, b.vehicles[i].e1);
    }
}

TEST(RunScenario, GridIntegrity) {
    ScenarioConfig cfg = step_scenario(3);
    for (double duration : {10.0, 10.005, 9.999}) {
        cfg.duration = duration;
        const SimulationLog log = run_scenario(cfg);
        const auto expected = static_cast<std::size_t>(std::floor(duration / cfg.dt + 1e-9)) + 1;
        EXPECT_EQ(log.samples(), expected);
        for (const VehicleTrace& tr : log.vehicles) {
            EXPECT_EQ(tr.x.size(), expected);
            EXPECT_EQ(tr.power.size(), expected);
            EXPECT_EQ(tr.mode.size(), expected);
            if (tr.has_errors) {
                EXPECT_EQ(tr.P.size(), expected);
            }
        }
        for (std::size_t k = 0; k < log.samples(); ++k) EXPECT_EQ(log.time[k], cfg.dt * static_cast<double>(k));
    }
}

TEST(RunScenario, NoBackwardInfluence) {
    ScenarioConfig a = step_scenario();
    a.duration = 60.0;
    ScenarioConfig b = a;
    b.params[3].headway = 1.1;
    b.params[4].standstill = 8.0;
    b.initial.offsets = {0.0, 0.0, 0.4, -0.3};
    const SimulationLog la = run_scenario(a);
    const SimulationLog lb = run_scenario(b);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(la.vehicles[i].x, lb.vehicles[i].x) << i;
        EXPECT_EQ(la.vehicles[i].u, lb.vehicles[i].u) << i;
    }
    EXPECT_NE(la.vehicles[3].x, lb.vehicles[3].x);
}

TEST(RunScenario, StageRatesUseOnlyOwnAndPredecessorState) {
    const ScenarioConfig cfg = step_scenario();
    std::vector<VehicleState> base = initialize_platoon(cfg);
    for (std::size_t i = 0; i < base.size(); ++i) {
        base[i].velocity = 10.0 + 0.1 * static_cast<double>(i);
        base[i].acceleration = 0.05 * static_cast<double>(i);
        base[i].control_input = 0.2;
    }
    const std::vector<double> integral(base.size(), 0.0);
    std::vector<VehicleState> s0 = base;
    const auto r0 = detail::stage_rates(cfg, 6.0, 6.0, s0, integral);
    for (std::size_t j = 0; j < base.size(); ++j) {
        std::vector<VehicleState> s1 = base;
        s1[j].position += 0.7;
        s1[j].velocity -= 0.3;
        s1[j].acceleration += 0.2;
        if (j > 0) s1[j].control_input = -0.4;
        const auto r1 = detail::stage_rates(cfg, 6.0, 6.0, s1, integral);
        for (std::size_t i = 1; i < base.size(); ++i) {
            if (i == j || i == j + 1) continue;
            EXPECT_EQ(r0.rate[i].u, r1.rate[i].u) << "vehicle " << i << " perturbed " << j;
            EXPECT_EQ(r0.P[i], r1.P[i]);
        }
    }
}

TEST(RunScenario, ConfigValidation) {
    ScenarioConfig cfg = step_scenario();
    cfg.n_vehicles = 0;
    cfg.params.clear();
    EXPECT_THROW(run_scenario(cfg), ConfigError);
    cfg = step_scenario();
    cfg.dt = 0.0;
    EXPECT_THROW(run_scenario(cfg), ConfigError);
    cfg = step_scenario();
    cfg.duration = cfg.dt;
    EXPECT_THROW(run_scenario(cfg), ConfigError);
    cfg = step_scenario();
    cfg.params[2].headway = 0.0;
    try {
        run_scenario(cfg);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "vehicles[2].headway");
    }
}

TEST(RunScenario, GainViolationPolicy) {
    ScenarioConfig cfg = step_scenario(2);
    cfg.duration = 5.0;
    cfg.gains.alpha2 = 0.4;
    const SimulationLog log = run_scenario(cfg);
    EXPECT_FALSE(log.warnings.empty());
    cfg.on_gain_violation = GainViolationPolicy::Error;
    EXPECT_THROW(run_scenario(cfg), ConfigError);
}

TEST(RunScenario, DivergenceAbortsWithStep) {
    ScenarioConfig cfg = step_scenario(2);
    cfg.params[0].input_limit = 1e307;
    cfg.leader = PiecewiseAcceleration{{{0.0, 1e307}}};
    try {
        run_scenario(cfg);
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_NE(e.step(), NumericError::npos);
    }
}

TEST(RunScenario, SpeedTraceStartsAtTraceSpeed) {
    ScenarioConfig cfg = step_scenario(3);
    cfg.leader = SpeedTrace({0.0, 10.0, 20.0}, {8.0, 12.0, 12.0});
    cfg.duration = 20.0;
    const SimulationLog log = run_scenario(cfg);
    for (const VehicleTrace& tr : log.vehicles) EXPECT_EQ(tr.v.front(), 8.0);
    EXPECT_NEAR(log.vehicles[0].v.back(), 12.0, 0.05);
}

TEST(RunScenario, PidBaselineRuns) {
    ScenarioConfig cfg = step_scenario();
    cfg.controller = ControllerKind::PidBaseline;
    const SimulationLog log = run_scenario(cfg);
    for (std::size_t i = 1; i < log.vehicles.size(); ++i) {
        EXPECT_TRUE(std::isnan(log.vehicles[i].P[100]));
        EXPECT_LT(max_abs(log.vehicles[i].e1, 10000), 1e-2);
    }
    for (double g : minimum_gaps(log)) EXPECT_GT(g, 0.0);
}
