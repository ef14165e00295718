// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_EXPERIMENTS_HPP
#define PHFLOW_EXPERIMENTS_HPP

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "phflow/data.hpp"
#include "phflow/landscape.hpp"
#include "phflow/metrics.hpp"
#include "phflow/train.hpp"

namespace phflow {

using Json = nlohmann::json;

/// Built-in experiment names:
/// linear_single, beta_sweep, linear_sequential, duffing_batch, gd_compare.
const std::vector<std::string>& experiment_names();

/// Fully-populated default configuration for one experiment.
Json default_config(const std::string& experiment);

/// defaults <- file overrides <- seed override <- --set overrides. Unknown
/// keys are rejected; every value in the result is concrete, so the resolved
/// document doubles as the run manifest.
Json resolve_config(const std::string& experiment, const std::optional<Json>& file_config,
                    const std::optional<std::uint64_t>& seed_override,
                    const std::vector<std::pair<std::string, std::string>>& set_overrides);

struct LinearSingleOutcome {
    TrajectoryRecord trajectory;
    Vector y_final;
    Scalar e_r = 0.0;
    Scalar theta_norm = 0.0;
};

struct BetaSweepOutcome {
    std::vector<Scalar> betas;
    std::vector<Scalar> e_r;
    std::vector<Scalar> theta_norm;
};

struct LinearSequentialOutcome {
    SequentialResult training;
    Dataset dataset;  // with split
    Scalar test_accuracy = 0.0;
    DecisionGrid grid;
};

struct DuffingOutcome {
    BatchResult training;
    Dataset dataset;
    ErrorField field;
    Scalar mean_error_train_inputs = 0.0;
    Scalar initial_loss = 0.0;
    Scalar final_loss = 0.0;
    Scalar velocity_convergence_fraction = 0.0;  // share of |thetadot_i| < threshold at probe time
    Index parameter_count = 0;
};

struct GdCompareOutcome {
    std::vector<Vector> gd_iterates;
    std::vector<Scalar> gd_values;
    OdeSolution ph_trajectory;  // 4-dim states (theta, omega)
    std::vector<Scalar> ph_values;
    Landscape landscape;
};

LinearSingleOutcome run_linear_single(const Json& cfg);
BetaSweepOutcome run_beta_sweep(const Json& cfg);
LinearSequentialOutcome run_linear_sequential(const Json& cfg);
DuffingOutcome run_duffing_batch(const Json& cfg);
GdCompareOutcome run_gd_compare(const Json& cfg);

/// Runs the experiment named in cfg["experiment"] and writes its artifact set
/// (CSV files, summary.json, manifest.json) into out_dir.
void run_experiment_to_dir(const Json& cfg, const std::string& out_dir);

/// Sweep worker cap: PHFLOW_THREADS when set, hardware concurrency otherwise.
unsigned sweep_thread_count(Index points);

}  // namespace phflow

#endif  // PHFLOW_EXPERIMENTS_HPP
