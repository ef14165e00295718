// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_DATA_HPP
#define PHFLOW_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phflow/ode.hpp"
#include "phflow/types.hpp"

namespace phflow {

/// Disjoint train/test index sets covering 0..s-1, each sorted ascending.
struct DatasetSplit {
    std::vector<Index> train;
    std::vector<Index> test;
};

/// Ordered input/label pairs (U_s, Y_s) with optional split metadata.
struct Dataset {
    std::vector<Sample> samples;
    std::optional<DatasetSplit> split;
    std::uint64_t seed = 0;

    Index size() const { return static_cast<Index>(samples.size()); }
    Index input_dim() const { return samples.empty() ? 0 : samples.front().input.size(); }
    Index label_dim() const { return samples.empty() ? 0 : samples.front().label.size(); }

    Batch all() const { return Batch(samples); }
    Batch single(Index i) const { return Batch(samples).subspan(static_cast<std::size_t>(i), 1); }

    /// Materialized subsets, preserving the stored order.
    Dataset train_subset() const;
    Dataset test_subset() const;

    void validate() const;
};

/// Two isotropic Gaussian classes with one-hot labels [1,0] / [0,1],
/// shuffled by the seed. Per class, each point draws two normals from the
/// shared splitmix64 stream (class 1 first), then a Fisher-Yates pass on the
/// same stream shuffles the 2n samples.
Dataset gaussian_blobs(std::uint64_t seed, Index n_per_class, const Vector& mean1,
                       const Vector& mean2, Scalar sigma);

/// Seeded train/test split; train size = floor(ratio * s + 0.5).
Dataset split_dataset(const Dataset& dataset, Scalar ratio_train, std::uint64_t seed);

/// Duffing oscillator right-hand side du/dx = [u2, -u1 - u2 - 0.5 u1^3].
Vector duffing_field(const Vector& u);

struct DuffingSpec {
    Scalar x_start = 0.0;
    Scalar x_end = 8.0;
    Index n_samples = 400;
    Vector u0 = (Vector(2) << 1.5, 1.0).finished();

    void validate() const;
};

/// Samples one Duffing trajectory at n_samples + 1 evenly spaced points and
/// emits n_samples pairs (u(x_i), forward difference). The trajectory is
/// integrated at tolerances no looser than 1e-10 / 1e-12 regardless of cfg.
Dataset duffing_dataset(const DuffingSpec& spec, const IntegratorConfig& cfg);

/// CSV with header u_1..u_n,y_1..y_m; one row per sample.
void write_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset read_dataset_csv(const std::string& path, Index input_dim, Index label_dim);

/// JSON manifest describing how a dataset was generated: seed, generator
/// name, generator parameters, and the split sizes when present.
void write_dataset_manifest(const Dataset& dataset, const std::string& generator,
                            const std::string& parameters_json, const std::string& path);

}  // namespace phflow

#endif  // PHFLOW_DATA_HPP
