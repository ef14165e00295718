// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_METRICS_HPP
#define PHFLOW_METRICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "phflow/data.hpp"
#include "phflow/net.hpp"
#include "phflow/types.hpp"

namespace phflow {

/// Rectangle [x1_min, x1_max] x [x2_min, x2_max].
struct Rectangle {
    Scalar x1_min, x1_max;
    Scalar x2_min, x2_max;
};

struct GridResolution {
    Index n1 = 50;
    Index n2 = 50;
};

/// E(u) = ||Phi(u) - f(u, theta)||_2 evaluated on a rectangular grid.
struct ErrorField {
    std::vector<Scalar> grid_x1;
    std::vector<Scalar> grid_x2;
    Matrix values;  // values(i, j) = E(grid_x1[i], grid_x2[j])
    Scalar mean = 0.0;
    Scalar max = 0.0;
};

/// Relative output tracking squared error ||y_hat - y||^2 / ||y_hat||^2.
Scalar relative_error(const Vector& y_hat, const Vector& y_final);

/// Fraction of samples whose predicted argmax class matches the label argmax.
/// Ties break toward the lower index.
Scalar accuracy(const NetworkSpec& spec, const Vector& theta, Batch samples);

Index argmax_lowest(const Vector& v);

using TrueField = std::function<Vector(const Vector&)>;

ErrorField error_field(const NetworkSpec& spec, const Vector& theta, const Rectangle& domain,
                       const GridResolution& resolution, const TrueField& field);

/// Mean of E(u) over an explicit list of inputs.
Scalar mean_field_error(const NetworkSpec& spec, const Vector& theta, Batch samples,
                        const TrueField& field);

/// Predicted class index per grid node.
struct DecisionGrid {
    std::vector<Scalar> grid_x1;
    std::vector<Scalar> grid_x2;
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> classes;
};

DecisionGrid decision_grid(const NetworkSpec& spec, const Vector& theta, const Rectangle& domain,
                           const GridResolution& resolution);

/// Long-format CSV (x1, x2, value).
void write_error_field_csv(const ErrorField& field, const std::string& path);
void write_decision_grid_csv(const DecisionGrid& grid, const std::string& path);

}  // namespace phflow

#endif  // PHFLOW_METRICS_HPP
