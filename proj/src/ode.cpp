// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/ode.hpp"

#include <algorithm>
#include <cmath>

namespace phflow {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw ContractError("IntegratorConfig: dt must be positive");
    if (!(rtol > 0.0)) throw ContractError("IntegratorConfig: rtol must be positive");
    if (!(atol > 0.0)) throw ContractError("IntegratorConfig: atol must be positive");
    if (!(record_every > 0.0)) throw ContractError("IntegratorConfig: record_every must be positive");
    if (max_steps < 1) throw ContractError("IntegratorConfig: max_steps must be positive");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr Scalar kC[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr Scalar kA21 = 1.0 / 5.0;
constexpr Scalar kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr Scalar kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr Scalar kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr Scalar kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr Scalar kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// b5 - b4, the embedded error weights (k7 = f(t+h, y_new)).
constexpr Scalar kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr Scalar kSafety = 0.9;
constexpr Scalar kMinFactor = 0.2;
constexpr Scalar kMaxFactor = 5.0;

void check_finite(const Vector& y, Scalar t) {
    if (!y.allFinite()) {
        throw NonFiniteError("integration produced a non-finite state component at t = " +
                                 std::to_string(t),
                             t);
    }
}

class Stepper {
public:
    Stepper(const FieldFn& field, const IntegratorConfig& cfg) : field_(field), cfg_(cfg) {}

    // One classical RK4 step of size h.
    Vector rk4_step(Scalar t, const Vector& y, Scalar h) const {
        const Vector k1 = field_(t, y);
        const Vector k2 = field_(t + 0.5 * h, y + (0.5 * h) * k1);
        const Vector k3 = field_(t + 0.5 * h, y + (0.5 * h) * k2);
        const Vector k4 = field_(t + h, y + h * k3);
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // One DOPRI5 attempt of size h; returns the scaled error norm.
    Scalar dopri5_attempt(Scalar t, const Vector& y, Scalar h, Vector& y_new) const {
        const Vector k1 = field_(t, y);
        const Vector k2 = field_(t + kC[1] * h, y + h * (kA21 * k1));
        const Vector k3 = field_(t + kC[2] * h, y + h * (kA31 * k1 + kA32 * k2));
        const Vector k4 = field_(t + kC[3] * h, y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
        const Vector k5 =
            field_(t + kC[4] * h, y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
        const Vector k6 = field_(
            t + kC[5] * h, y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
        y_new = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        const Vector k7 = field_(t + h, y_new);
        const Vector err =
            h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

        Scalar sum = 0.0;
        for (Index i = 0; i < y.size(); ++i) {
            const Scalar scale =
                cfg_.atol + cfg_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const Scalar e = err[i] / scale;
            sum += e * e;
        }
        return std::sqrt(sum / static_cast<Scalar>(y.size()));
    }

private:
    const FieldFn& field_;
    const IntegratorConfig& cfg_;
};

}  // namespace

OdeSolution integrate(const FieldFn& field, const Vector& y0, Scalar t_start, Scalar t_end,
                      const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(t_end > t_start)) throw ContractError("integrate: t_end must exceed t_start");
    check_finite(y0, t_start);

    OdeSolution solution;
    solution.times.push_back(t_start);
    solution.states.push_back(y0);

    const Stepper stepper(field, cfg);
    Vector y = y0;
    Scalar t = t_start;
    long steps = 0;

    // Next output sample, indexed to avoid accumulating rounding in the grid.
    long record_index = 1;
    auto next_record_time = [&]() {
        return std::min(t_end, t_start + static_cast<Scalar>(record_index) * cfg.record_every);
    };

    Scalar h = std::min(cfg.dt, t_end - t_start);
    Scalar err_prev = 1.0;

    while (t < t_end) {
        Scalar t_stop = next_record_time();
        if (t_stop <= t) {  // grid point passed exactly; advance the index
            ++record_index;
            continue;
        }
        const Scalar span = t_stop - t;

        if (cfg.method == OdeMethod::Rk4Fixed) {
            const Scalar step = std::min(cfg.dt, span);
            if (++steps > cfg.max_steps) {
                throw DivergenceError("integrate: max_steps exceeded at t = " + std::to_string(t),
                                      t);
            }
            y = stepper.rk4_step(t, y, step);
            t += step;
            if (std::abs(t - t_end) <= 1e-12 * (1.0 + std::abs(t_end))) t = t_end;
            check_finite(y, t);
        } else {
            h = std::min(h, span);
            if (++steps > cfg.max_steps) {
                throw DivergenceError("integrate: max_steps exceeded at t = " + std::to_string(t),
                                      t);
            }
            Vector y_new;
            const Scalar err = stepper.dopri5_attempt(t, y, h, y_new);
            if (!std::isfinite(err)) {
                throw NonFiniteError(
                    "integration produced a non-finite state component at t = " +
                        std::to_string(t),
                    t);
            }
            if (err <= 1.0) {
                t += h;
                if (std::abs(t - t_end) <= 1e-12 * (1.0 + std::abs(t_end))) t = t_end;
                y = std::move(y_new);
                check_finite(y, t);
                // PI step-size controller (safety 0.9, growth clamp [0.2, 5]).
                const Scalar e_n = std::max(err, 1e-10);
                Scalar factor = kSafety * std::pow(e_n, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
                factor = std::clamp(factor, kMinFactor, kMaxFactor);
                h *= factor;
                err_prev = e_n;
            } else {
                const Scalar factor =
                    std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, 1.0);
                h *= factor;
                continue;
            }
        }

        if (t >= t_stop) {
            solution.times.push_back(t);
            solution.states.push_back(y);
            if (t_stop < t_end) ++record_index;
        }
    }

    return solution;
}

void TrajectoryRecord::append(Scalar t, PHState state, Scalar h, Scalar hdot) {
    times.push_back(t);
    states.push_back(std::move(state));
    hamiltonians.push_back(h);
    dissipation_rates.push_back(hdot);
}

TrajectoryRecord integrate_ph(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state0,
                              Scalar t_start, Scalar t_end, const IntegratorConfig& icfg,
                              Batch batch) {
    const FieldFn field = [&](Scalar, const Vector& xi) {
        return vector_field(spec, cfg, PHState::unpack(xi), batch);
    };
    const OdeSolution solution = integrate(field, state0.packed(), t_start, t_end, icfg);

    TrajectoryRecord record;
    for (std::size_t i = 0; i < solution.times.size(); ++i) {
        PHState state = PHState::unpack(solution.states[i]);
        const EnergyReport energy = hamiltonian(spec, cfg, state, batch);
        record.append(solution.times[i], std::move(state), energy.hamiltonian,
                      energy.dissipation_rate);
    }
    return record;
}

}  // namespace phflow
