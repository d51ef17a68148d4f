#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evcacc/cacc_control.hpp"
#include "evcacc/platoon_sim.hpp"

using namespace evcacc;

TEST(SpacingErrors, HandExample) {
    VehicleParams p;
    p.length = 4.7;
    const VehicleState pred{20.0, 10.0, 0.0, 0.0};
    const VehicleState fol{0.0, 10.0, 0.0, 0.0};
    const SpacingErrors e = spacing_errors(pred, fol, p, p, ControllerGains{});
    EXPECT_NEAR(e.e1, 5.3, 1e-12);
    EXPECT_EQ(e.e2, 0.0);
    EXPECT_EQ(e.e3, 0.0);
}

TEST(SpacingErrors, ZeroAtDesiredSpacing) {
    VehicleParams p;
    const double v = 13.0;
    const VehicleState pred{100.0, v, 0.0, 0.0};
    const VehicleState fol{100.0 - p.length - p.standstill - p.headway * v, v, 0.0, 0.0};
    const SpacingErrors e = spacing_errors(pred, fol, p, p, ControllerGains{});
    for (double x : {e.e1, e.e2, e.e3, e.r1, e.r2, e.phi}) EXPECT_EQ(x, 0.0);
}

TEST(SpacingErrors, AuxiliaryErrorsHandExample) {
    VehicleParams p;
    ControllerGains g; // alpha1 = 2, alpha2 = 3
    const VehicleState fol{0.0, 0.0, 0.0, 0.0};
    const VehicleState pred{p.length + p.standstill + 1.0, 0.2, 0.0, 0.0};
    const SpacingErrors e = spacing_errors(pred, fol, p, p, g);
    EXPECT_NEAR(e.e1, 1.0, 1e-12);
    EXPECT_NEAR(e.e2, 0.2, 1e-15);
    EXPECT_EQ(e.e3, 0.0);
    EXPECT_NEAR(e.r1, 2.2, 1e-12);
    EXPECT_NEAR(e.r2, 7.0, 1e-12);
}

TEST(SpacingErrors, DefinitionsHoldExactlyOnRandomStates) {
    VehicleParams p;
    ControllerGains g{1.7, 2.9, 3.3, 1.0};
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> r(-2.0, 2.0);
    for (int k = 0; k < 500; ++k) {
        const VehicleState pred{30.0 + r(rng), 10.0 + r(rng), r(rng), r(rng)};
        const VehicleState fol{r(rng), 10.0 + r(rng), r(rng), r(rng)};
        const SpacingErrors e = spacing_errors(pred, fol, p, p, g);
        EXPECT_EQ(e.r1, e.e2 + g.alpha1 * e.e1);
        EXPECT_EQ(e.r2, (e.e3 + g.alpha1 * e.e2) + g.alpha2 * e.r1);
        const double jerk = model_jerk(fol.acceleration, fol.control_input, p);
        EXPECT_EQ(e.e3, pred.acceleration - fol.acceleration - p.headway * jerk);
    }
}

TEST(SpacingErrors, RejectsNonFinite) {
    VehicleParams p;
    VehicleState bad{0.0, NAN, 0.0, 0.0};
    EXPECT_THROW(spacing_errors(bad, VehicleState{}, p, p, ControllerGains{}), NumericError);
}

TEST(Phi, HandExamples) {
    VehicleParams p;
    EXPECT_EQ(phi(PredecessorBroadcast{0.0, 0.0, 0.7378, 0.6998}, VehicleState{}, p), 0.0);
    EXPECT_NEAR(phi(PredecessorBroadcast{0.0, 1.0, 0.7378, 0.6998}, VehicleState{}, p), 0.6998, 1e-15);

    // Equal mode lags so the follower's gamma at u = 0 is 0.6998.
    VehicleParams q;
    q.gamma_decel = q.gamma_accel = 0.6998;
    const double expected = -0.6998 - 0.5 * 0.6998 * (-0.6998);
    const double got = phi(PredecessorBroadcast{0.0, 0.0, 0.7378, 0.6998}, VehicleState{0.0, 0.0, 1.0, 0.0}, q);
    EXPECT_NEAR(got, expected, 1e-15);
    EXPECT_NEAR(got, -0.45494, 1e-5);
}

TEST(ControlLawP, HandExamples) {
    VehicleParams p;
    ControllerGains g;
    const VehicleState moving{0.0, 0.0, 0.0, 1.0}; // u outside the deadband
    EXPECT_EQ(control_law_P(SpacingErrors{}, VehicleState{}, PredecessorBroadcast{0.0, 0.0, 0.7378, 0.6998}, p, g), 0.0);

    const SpacingErrors e{1.0, 0.2, 0.0, 2.2, 7.0, 0.0};
    EXPECT_NEAR(control_law_P(e, moving, PredecessorBroadcast{0.0, 0.0, 0.7378, 0.6998}, p, g), 24.0584, 1e-12);

    EXPECT_NEAR(control_law_P(SpacingErrors{}, VehicleState{}, PredecessorBroadcast{1.0, 0.0, 0.7378, 0.6998}, p, g),
                0.7378, 1e-15);
}

TEST(ControlLawP, AffineInEachErrorWithExpectedCoefficients) {
    VehicleParams p;
    ControllerGains g{1.3, 2.1, 3.7, 1.0};
    const VehicleState fol{0.0, 5.0, 0.2, -0.8};
    const double beta = mode_coefficients(fol.control_input, p).beta;
    const PredecessorBroadcast pred{0.4, 0.1, 0.7378, 0.6998};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> r(-3.0, 3.0);

    struct Probe {
        double SpacingErrors::*field;
        double coefficient;
    };
    const Probe probes[] = {
        {&SpacingErrors::e1, -g.alpha2 * g.alpha1 * g.alpha1},
        {&SpacingErrors::e2, 0.0},
        {&SpacingErrors::e3, g.alpha1 + g.alpha2},
        {&SpacingErrors::r1, g.alpha1 * g.alpha2 + 1.0},
        {&SpacingErrors::r2, beta * g.c_gain},
        {&SpacingErrors::phi, -1.0},
    };
    for (int k = 0; k < 50; ++k) {
        SpacingErrors e{r(rng), r(rng), r(rng), r(rng), r(rng), r(rng)};
        const double base = control_law_P(e, fol, pred, p, g);
        for (const Probe& pr : probes) {
            const double d = r(rng);
            SpacingErrors shifted = e;
            shifted.*(pr.field) += d;
            EXPECT_NEAR(control_law_P(shifted, fol, pred, p, g) - base, pr.coefficient * d, 1e-12);
        }
    }
}

TEST(UpdateControlInput, FilterExamples) {
    VehicleParams p; // headway 0.5
    EXPECT_EQ(update_control_input(0.0, 0.0, p, 0.01), 0.0);

    // One step of length b from rest: u = (P / beta1)(1 - e^-1).
    const double P = 1.0;
    EXPECT_NEAR(update_control_input(P, 0.0, p, p.headway), 0.6321205588 * P / p.beta_accel, 1e-9);

    // Many short steps land on the same closed form once u leaves the deadband.
    double u = 0.0;
    for (int k = 0; k < 50; ++k) u = update_control_input(P, u, p, 0.01);
    EXPECT_NEAR(u, (1.0 - std::exp(-1.0)) * P / p.beta_accel, 1e-12);

    // Inside the deadband the sign of P picks the regen coefficient.
    const double un = update_control_input(-1.0, 0.0, p, 0.01);
    EXPECT_LT(un, 0.0);
    EXPECT_NEAR(un, -(1.0 - std::exp(-0.01 / p.headway)) / p.beta_decel, 1e-15);
    EXPECT_THROW(update_control_input(1.0, 0.0, p, 0.0), ConfigError);
}

TEST(UpdateControlInput, SaturatesAtInputLimit) {
    VehicleParams p;
    double u = 0.0;
    for (int k = 0; k < 1000; ++k) u = update_control_input(100.0, u, p, 0.01);
    EXPECT_EQ(u, p.input_limit);
    EXPECT_EQ(control_input_rate(100.0, p.input_limit, p), 0.0);
    EXPECT_LT(control_input_rate(-100.0, p.input_limit, p), 0.0);
}

TEST(Equilibrium, PZeroHoldsInputAtZero) {
    VehicleParams p;
    ControllerGains g;
    const VehicleState pred{50.0, 0.0, 0.0, 0.0};
    const VehicleState fol{50.0 - p.length - p.standstill, 0.0, 0.0, 0.0};
    const SpacingErrors e = spacing_errors(pred, fol, p, p, g);
    const double P = control_law_P(e, fol, PredecessorBroadcast::from(pred, p), p, g);
    EXPECT_EQ(P, 0.0);
    double u = 0.0;
    for (int k = 0; k < 1000; ++k) u = update_control_input(P, u, p, 0.01);
    EXPECT_EQ(u, 0.0);
}

TEST(PidBaseline, Examples) {
    PidGains pid{0.5, 0.0, 0.0, 0.0};
    PidState st;
    EXPECT_EQ(pid_baseline(SpacingErrors{}, PredecessorBroadcast{}, pid, st, 0.01, 4.0).u, 0.0);
    EXPECT_DOUBLE_EQ(pid_baseline(SpacingErrors{1.0}, PredecessorBroadcast{}, pid, st, 0.01, 4.0).u, 0.5);

    PidGains integ{0.0, 0.2, 0.0, 0.0};
    double u = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const PidOutput out = pid_baseline(SpacingErrors{0.1}, PredecessorBroadcast{}, integ, st, 0.01, 4.0);
        st = out.state;
        u = out.u;
    }
    EXPECT_NEAR(u, 0.2, 1e-12);

    PidGains all{1.0, 0.0, 2.0, 0.5};
    EXPECT_NEAR(pid_baseline(SpacingErrors{0.3, 0.1}, PredecessorBroadcast{0.8}, all, PidState{}, 0.01, 4.0).u,
                0.3 + 0.2 + 0.4, 1e-15);
    EXPECT_EQ(pid_baseline(SpacingErrors{100.0}, PredecessorBroadcast{}, all, PidState{}, 0.01, 4.0).u, 4.0);
    EXPECT_EQ(pid_baseline(SpacingErrors{-100.0}, PredecessorBroadcast{}, all, PidState{}, 0.01, 4.0).u, -4.0);
}

TEST(PidGains, Invariants) {
    PidGains g;
    EXPECT_NO_THROW(g.validate());
    g.kp = 0.0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = PidGains{};
    g.kd = NAN;
    EXPECT_THROW(g.validate(), ConfigError);
}

// Along a simulated trajectory the produced P gives r2' = -C beta r2 - r1.
TEST(ClosedLoop, AuxiliaryErrorDynamics) {
    ScenarioConfig cfg;
    cfg.n_vehicles = 2;
    cfg.duration = 30.0;
    cfg.params.assign(2, VehicleParams{});
    cfg.leader = PiecewiseAcceleration{{{0.0, 0.0}, {2.0, 1.0}, {10.0, 0.0}, {18.0, -0.6}, {24.0, 0.0}}};
    cfg.initial.speed = 10.0;
    cfg.initial.offsets = {0.8};
    const SimulationLog log = run_scenario(cfg);
    const VehicleTrace& f = log.vehicles[1];
    const VehicleTrace& l = log.vehicles[0];
    const VehicleParams& p = cfg.params[1];
    const double dt = log.dt;

    std::size_t checked = 0;
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 2; k + 2 < log.samples(); ++k) {
        bool steady = true;
        for (std::size_t j = k - 2; j <= k + 2; ++j) {
            steady = steady && f.mode[j] == f.mode[k] && l.mode[j] == l.mode[k] && f.mode[k] != DriveMode::Boundary;
            // Near the deadband edge the mode can flip between samples.
            steady = steady && std::abs(f.u[j]) > p.deadband + 0.01;
        }
        // Leader input jumps at segment starts.
        for (double t : {2.0, 10.0, 18.0, 24.0}) steady = steady && std::abs(log.time[k] - t) > 3 * dt;
        if (!steady) continue;
        const double dr2 = (-f.r2[k + 2] + 8 * f.r2[k + 1] - 8 * f.r2[k - 1] + f.r2[k - 2]) / (12 * dt);
        const double beta = mode_coefficients(f.u[k], p).beta;
        const double rhs = -cfg.gains.c_gain * beta * f.r2[k] - f.r1[k];
        worst = std::max(worst, std::abs(dr2 - rhs));
        scale = std::max(scale, std::abs(rhs));
        ++checked;
    }
    ASSERT_GT(checked, 1000u);
    ASSERT_GT(scale, 1e-3);
    EXPECT_LT(worst, 1e-6 * std::max(1.0, scale)) << "scale " << scale;
}
