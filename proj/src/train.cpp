// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/train.hpp"

#include <cmath>
#include <string>

namespace phflow {

void SequentialConfig::validate() const {
    if (!(t_star > 0.0)) throw ContractError("SequentialConfig: t_star must be positive");
    if (epochs < 1) throw ContractError("SequentialConfig: epochs must be >= 1");
}

void GDConfig::validate() const {
    if (!(step_size > 0.0)) throw ContractError("GDConfig: step_size must be positive");
    if (steps < 1) throw ContractError("GDConfig: steps must be >= 1");
}

SequentialResult train_sequential(const NetworkSpec& spec, const PHConfig& cfg,
                                  const SequentialConfig& seq, const IntegratorConfig& icfg,
                                  const Dataset& dataset, const PHState& state0) {
    seq.validate();
    if (dataset.size() == 0) throw ContractError("train_sequential: empty dataset");
    if (state0.theta.size() != spec.parameter_count()) {
        throw ContractError("train_sequential: state dimension does not match the network");
    }

    const Index s = dataset.size();
    SequentialResult result;
    result.final_state = state0;

    for (Index epoch = 0; epoch < seq.epochs; ++epoch) {
        for (Index zeta = 0; zeta < s; ++zeta) {
            const Batch active = dataset.single(zeta);
            TrajectoryRecord dwell;
            try {
                dwell = integrate_ph(spec, cfg, result.final_state, 0.0, seq.t_star, icfg, active);
            } catch (const DivergenceError& e) {
                throw DivergenceError("epoch " + std::to_string(epoch + 1) + ", sample " +
                                          std::to_string(zeta + 1) + ": " + e.what(),
                                      result.total_time + e.time());
            } catch (const NonFiniteError& e) {
                throw NonFiniteError("epoch " + std::to_string(epoch + 1) + ", sample " +
                                         std::to_string(zeta + 1) + ": " + e.what(),
                                     result.total_time + e.time());
            }

            // Merge onto the global time axis; the dwell's first sample
            // duplicates the previous jump state (xi+ = xi), so drop it
            // after the very first dwell.
            const std::size_t start = result.trajectory.size() == 0 ? 0 : 1;
            for (std::size_t i = start; i < dwell.size(); ++i) {
                result.trajectory.append(result.total_time + dwell.times[i],
                                         std::move(dwell.states[i]), dwell.hamiltonians[i],
                                         dwell.dissipation_rates[i]);
            }
            result.final_state = result.trajectory.states.back();
            result.total_time += seq.t_star;
            ++result.jump_count;
        }
        result.epoch_losses.push_back(
            hamiltonian(spec, cfg, result.final_state, dataset.all()).hamiltonian);
    }
    return result;
}

BatchResult train_batch(const NetworkSpec& spec, const PHConfig& cfg,
                        const IntegratorConfig& icfg, const Dataset& dataset,
                        const PHState& state0, Scalar t_total) {
    if (dataset.size() == 0) throw ContractError("train_batch: empty dataset");
    if (t_total < 0.0) throw ContractError("train_batch: t_total must be non-negative");

    BatchResult result;
    if (t_total == 0.0) {
        const EnergyReport energy = hamiltonian(spec, cfg, state0, dataset.all());
        result.final_state = state0;
        result.trajectory.append(0.0, state0, energy.hamiltonian, energy.dissipation_rate);
        return result;
    }

    result.trajectory = integrate_ph(spec, cfg, state0, 0.0, t_total, icfg, dataset.all());
    result.final_state = result.trajectory.states.back();
    return result;
}

GDResult train_gd(const NetworkSpec& spec, const Dataset& dataset, const GDConfig& gd,
                  Scalar alpha, Scalar beta, const Vector& theta0) {
    gd.validate();
    if (dataset.size() == 0) throw ContractError("train_gd: empty dataset");

    PHConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;

    GDResult result;
    result.theta = theta0;
    Vector grad;
    for (Index step = 0; step < gd.steps; ++step) {
        const Scalar loss = potential_and_grad(spec, cfg, result.theta, dataset.all(), grad);
        if (!std::isfinite(loss)) {
            throw DivergenceError("train_gd: non-finite loss at step " + std::to_string(step),
                                  static_cast<Scalar>(step));
        }
        result.losses.push_back(loss);
        result.theta -= gd.step_size * grad;
    }
    result.losses.push_back(
        potential_and_grad(spec, cfg, result.theta, dataset.all(), grad));
    if (!std::isfinite(result.losses.back())) {
        throw DivergenceError("train_gd: non-finite final loss",
                              static_cast<Scalar>(gd.steps));
    }
    return result;
}

}  // namespace phflow
