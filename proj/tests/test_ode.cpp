// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "phflow/ode.hpp"
#include "test_util.hpp"

using namespace phflow;

TEST_CASE("zero field keeps the trajectory constant") {
    const FieldFn field = [](Scalar, const Vector& y) { return Vector::Zero(y.size()); };
    Vector y0(3);
    y0 << 1.0, -2.0, 0.5;
    IntegratorConfig cfg;
    cfg.record_every = 0.25;
    const OdeSolution sol = integrate(field, y0, 0.0, 1.0, cfg);
    for (const Vector& y : sol.states) CHECK((y.array() == y0.array()).all());
    CHECK(sol.final_time() == 1.0);
}

TEST_CASE("undamped oscillator conserves energy to 1e-8 over [0, 10]") {
    const FieldFn field = [](Scalar, const Vector& y) {
        Vector dy(2);
        dy << y[1], -y[0];
        return dy;
    };
    Vector y0(2);
    y0 << 1.0, 0.0;
    IntegratorConfig cfg;  // rk45 defaults
    cfg.record_every = 0.1;
    const OdeSolution sol = integrate(field, y0, 0.0, 10.0, cfg);
    const Scalar e0 = 0.5 * y0.squaredNorm();
    for (const Vector& y : sol.states) {
        CHECK(std::abs(0.5 * y.squaredNorm() - e0) < 1e-8);
    }
}

namespace {

// Closed-form solution of x'' = -x - x' from (1, 0):
// x(t) = exp(-t/2) (cos(w t) + sin(w t)/(2 w)), w = sqrt(3)/2.
Scalar damped_oscillator_exact(Scalar t) {
    const Scalar w = std::sqrt(3.0) / 2.0;
    return std::exp(-0.5 * t) * (std::cos(w * t) + std::sin(w * t) / (2.0 * w));
}

const FieldFn kDampedOscillator = [](Scalar, const Vector& y) {
    Vector dy(2);
    dy << y[1], -y[0] - y[1];
    return dy;
};

}  // namespace

TEST_CASE("damped oscillator matches the analytic solution at t = 5") {
    Vector y0(2);
    y0 << 1.0, 0.0;
    IntegratorConfig cfg;
    cfg.record_every = 5.0;
    const OdeSolution sol = integrate(kDampedOscillator, y0, 0.0, 5.0, cfg);
    CHECK(std::abs(sol.final_state()[0] - damped_oscillator_exact(5.0)) < 1e-6);
}

TEST_CASE("rk4 end-state error shrinks ~16x when the step halves") {
    Vector y0(2);
    y0 << 1.0, 0.0;
    const Scalar exact = damped_oscillator_exact(5.0);

    auto end_error = [&](Scalar dt) {
        IntegratorConfig cfg;
        cfg.method = OdeMethod::Rk4Fixed;
        cfg.dt = dt;
        cfg.record_every = 5.0;
        const OdeSolution sol = integrate(kDampedOscillator, y0, 0.0, 5.0, cfg);
        return std::abs(sol.final_state()[0] - exact);
    };

    const Scalar ratio = end_error(0.05) / end_error(0.025);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("integration is deterministic bit for bit") {
    Vector y0(2);
    y0 << 0.3, -1.1;
    IntegratorConfig cfg;
    cfg.record_every = 0.05;
    const OdeSolution a = integrate(kDampedOscillator, y0, 0.0, 3.0, cfg);
    const OdeSolution b = integrate(kDampedOscillator, y0, 0.0, 3.0, cfg);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.times[i] == b.times[i]);
        CHECK((a.states[i].array() == b.states[i].array()).all());
    }
}

TEST_CASE("record grid is strictly increasing and spans [t_start, t_end]") {
    IntegratorConfig cfg;
    cfg.record_every = 0.3;  // does not divide the span
    Vector y0(2);
    y0 << 1.0, 0.0;
    const OdeSolution sol = integrate(kDampedOscillator, y0, 0.5, 2.5, cfg);
    CHECK(sol.times.front() == 0.5);
    CHECK(sol.times.back() == 2.5);
    for (std::size_t i = 1; i < sol.times.size(); ++i) {
        CHECK(sol.times[i] > sol.times[i - 1]);
        CHECK(sol.times[i] - sol.times[i - 1] <= cfg.record_every + 1e-12);
    }
    CHECK(sol.times.size() == sol.states.size());
}

TEST_CASE("exhausting max_steps raises a divergence error with the time") {
    IntegratorConfig cfg;
    cfg.method = OdeMethod::Rk4Fixed;
    cfg.dt = 1e-4;
    cfg.max_steps = 10;
    cfg.record_every = 1.0;
    Vector y0(2);
    y0 << 1.0, 0.0;
    CHECK_THROWS_AS(integrate(kDampedOscillator, y0, 0.0, 1.0, cfg), DivergenceError);
}

TEST_CASE("non-finite states raise with the failure time") {
    const FieldFn blowup = [](Scalar, const Vector& y) {
        Vector dy(1);
        dy << y[0] * y[0];  // finite-time escape from y(0) = 1 at t = 1
        return dy;
    };
    Vector y0(1);
    y0 << 1.0;
    IntegratorConfig cfg;
    cfg.record_every = 10.0;
    cfg.max_steps = 100000;
    bool threw = false;
    try {
        integrate(blowup, y0, 0.0, 2.0, cfg);
    } catch (const NonFiniteError& e) {
        threw = true;
        CHECK(e.time() <= 2.0);
    } catch (const DivergenceError& e) {
        threw = true;  // acceptable: the controller may stall before overflow
        CHECK(e.time() <= 2.0);
    }
    CHECK(threw);

    const FieldFn nan_field = [](Scalar, const Vector& y) {
        return Vector::Constant(y.size(), std::numeric_limits<Scalar>::quiet_NaN());
    };
    CHECK_THROWS_AS(integrate(nan_field, y0, 0.0, 1.0, cfg), NonFiniteError);
}

TEST_CASE("bad integration windows are contract errors") {
    Vector y0(1);
    y0 << 1.0;
    const FieldFn field = [](Scalar, const Vector& y) { return y; };
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate(field, y0, 1.0, 1.0, cfg), ContractError);
    CHECK_THROWS_AS(integrate(field, y0, 2.0, 1.0, cfg), ContractError);
    cfg.dt = -1.0;
    CHECK_THROWS_AS(integrate(field, y0, 0.0, 1.0, cfg), ContractError);
}

TEST_CASE("PH trajectories have non-increasing J* within integrator slack") {
    SplitMix64 rng(71);
    const NetworkSpec spec = NetworkSpec::dense({2, 4, 2}, Activation::softplus(8.0));
    const Index p = spec.parameter_count();
    const std::vector<Sample> batch = {
        Sample{testutil::random_vector(rng, 2, -1.0, 1.0),
               testutil::random_vector(rng, 2, -1.0, 1.0)},
        Sample{testutil::random_vector(rng, 2, -1.0, 1.0),
               testutil::random_vector(rng, 2, -1.0, 1.0)}};

    PHConfig cfg;
    cfg.damping = SpdDiagonal::scaled_identity(0.8);
    PHState state0{testutil::random_vector(rng, p, -1.0, 1.0),
                   testutil::random_vector(rng, p, -1.0, 1.0)};

    IntegratorConfig icfg;
    icfg.record_every = 0.05;
    const TrajectoryRecord traj = integrate_ph(spec, cfg, state0, 0.0, 8.0, icfg, Batch(batch));

    REQUIRE(traj.size() > 10);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const Scalar prev = traj.hamiltonians[i - 1];
        CHECK(traj.hamiltonians[i] <= prev + 1e-6 * (1.0 + std::abs(prev)));
        CHECK(traj.dissipation_rates[i] <= 0.0);
    }
}
