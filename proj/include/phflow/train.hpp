// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_TRAIN_HPP
#define PHFLOW_TRAIN_HPP

#include "phflow/data.hpp"
#include "phflow/ode.hpp"
#include "phflow/phdyn.hpp"
#include "phflow/types.hpp"

namespace phflow {

/// Sequential (hybrid automaton) trainer parameters: dwell time t* per sample
/// and the epoch count. The state xi is always carried across jumps.
struct SequentialConfig {
    Scalar t_star = 0.1;
    Index epochs = 1;

    void validate() const;
};

struct SequentialResult {
    PHState final_state;
    std::vector<Scalar> epoch_losses;  // J*_batch on the full training set, one per epoch
    TrajectoryRecord trajectory;       // global time axis; J* of the active sample per dwell
    Index jump_count = 0;
    Scalar total_time = 0.0;
};

/// The sequential automaton: for each epoch, for zeta = 1..s, integrate the
/// PH flow on the single sample (u_zeta, y_zeta) from tau = 0 to tau = t*,
/// carrying xi across the jump. zeta resets at epoch boundaries and the first
/// sample is fetched again. Integration errors are annotated with
/// (epoch, zeta).
SequentialResult train_sequential(const NetworkSpec& spec, const PHConfig& cfg,
                                  const SequentialConfig& seq, const IntegratorConfig& icfg,
                                  const Dataset& dataset, const PHState& state0);

struct BatchResult {
    PHState final_state;
    TrajectoryRecord trajectory;
};

/// One integration over [0, t_total] with the full-dataset averaged
/// Hamiltonian. t_total = 0 returns state0 unchanged.
BatchResult train_batch(const NetworkSpec& spec, const PHConfig& cfg,
                        const IntegratorConfig& icfg, const Dataset& dataset,
                        const PHState& state0, Scalar t_total);

/// Discrete baseline parameters.
struct GDConfig {
    Scalar step_size = 0.1;
    Index steps = 100;

    void validate() const;
};

struct GDResult {
    Vector theta;
    std::vector<Scalar> losses;  // batch potential per step, losses[0] at theta0
};

/// Plain full-batch gradient descent on the potential part of the loss.
GDResult train_gd(const NetworkSpec& spec, const Dataset& dataset, const GDConfig& gd,
                  Scalar alpha, Scalar beta, const Vector& theta0);

}  // namespace phflow

#endif  // PHFLOW_TRAIN_HPP
