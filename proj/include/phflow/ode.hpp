// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_ODE_HPP
#define PHFLOW_ODE_HPP

#include <functional>
#include <vector>

#include "phflow/phdyn.hpp"
#include "phflow/types.hpp"

namespace phflow {

enum class OdeMethod { Rk4Fixed, Rk45Adaptive };

struct IntegratorConfig {
    OdeMethod method = OdeMethod::Rk45Adaptive;
    Scalar dt = 1e-3;           // fixed step for rk4; initial trial step for rk45
    Scalar rtol = 1e-6;
    Scalar atol = 1e-8;
    long max_steps = 10'000'000;
    Scalar record_every = 1e-2;  // output sampling interval in time units

    void validate() const;
};

/// Raw integrator output: states sampled every record_every plus the exact
/// end state. Times are strictly increasing with times[0] = t_start and
/// times[last] = t_end.
struct OdeSolution {
    std::vector<Scalar> times;
    std::vector<Vector> states;

    const Vector& final_state() const { return states.back(); }
    Scalar final_time() const { return times.back(); }
};

/// Right-hand side signature: dydt = field(t, y). The returned vector must
/// match y in size.
using FieldFn = std::function<Vector(Scalar, const Vector&)>;

/// Integrate y' = field(t, y) from t_start to t_end, stopping exactly at
/// t_end (final step truncated). Throws DivergenceError when max_steps is
/// exhausted and NonFiniteError when a state component stops being finite,
/// both carrying the failure time.
OdeSolution integrate(const FieldFn& field, const Vector& y0, Scalar t_start, Scalar t_end,
                      const IntegratorConfig& cfg);

/// Time-stamped (t, xi, J*, Hdot) samples of a PH trajectory.
struct TrajectoryRecord {
    std::vector<Scalar> times;
    std::vector<PHState> states;
    std::vector<Scalar> hamiltonians;
    std::vector<Scalar> dissipation_rates;

    std::size_t size() const { return times.size(); }
    void append(Scalar t, PHState state, Scalar h, Scalar hdot);
};

/// Integrate the PH flow for a fixed batch and annotate every recorded sample
/// with J* and the dissipation rate.
TrajectoryRecord integrate_ph(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state0,
                              Scalar t_start, Scalar t_end, const IntegratorConfig& icfg,
                              Batch batch);

}  // namespace phflow

#endif  // PHFLOW_ODE_HPP
