// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_NET_HPP
#define PHFLOW_NET_HPP

#include <utility>
#include <vector>

#include "phflow/types.hpp"

namespace phflow {

enum class ActivationKind { Identity, Softplus };

/// Per-layer activation. Softplus is the smooth ReLU
/// sigma(x) = (1/gamma) * ln(1 + exp(gamma * x)) with sharpness gamma > 0.
struct Activation {
    ActivationKind kind = ActivationKind::Identity;
    Scalar gamma = 1.0;

    static Activation identity() { return {ActivationKind::Identity, 1.0}; }
    static Activation softplus(Scalar gamma) { return {ActivationKind::Softplus, gamma}; }
};

Scalar softplus_value(Scalar x, Scalar gamma);
Scalar softplus_slope(Scalar x, Scalar gamma);

/// Layer widths [n_u = h_0, h_1, ..., h_l = n_y] plus one activation per layer.
struct NetworkSpec {
    std::vector<Index> layer_widths;
    std::vector<Activation> activations;

    Index layer_count() const { return static_cast<Index>(layer_widths.size()) - 1; }
    Index input_dim() const { return layer_widths.front(); }
    Index output_dim() const { return layer_widths.back(); }

    /// p = sum_i h_i * (1 + h_{i-1}).
    Index parameter_count() const;

    void validate() const;

    /// Hidden layers share `hidden`, output layer is `output`.
    static NetworkSpec dense(std::vector<Index> widths, Activation hidden,
                             Activation output = Activation::identity());
};

/// Per-layer weight matrix and bias extracted from a flat parameter vector.
struct LayerParams {
    Matrix weights;  // h_i x h_{i-1}
    Vector bias;     // h_i
};

/// Flat layout per layer i: row-major W_i entries, then b_i, concatenated over i.
Vector flatten_params(const NetworkSpec& spec, const std::vector<LayerParams>& layers);
std::vector<LayerParams> unflatten_params(const NetworkSpec& spec, const Vector& theta);

/// Network output f(u, theta).
Vector forward(const NetworkSpec& spec, const Vector& theta, const Vector& u);

/// Potential part of the sample loss,
///   J = 1/2 * [alpha * ||y_hat - f(u, theta)||^2 + beta * theta' theta],
/// together with its exact gradient with respect to theta (reverse-mode
/// accumulation through all layers). The gradient is the true descent
/// direction: d/dtheta (1/2 alpha ||y_hat - f||^2) = -alpha * Jf' * (y_hat - f).
Scalar loss_and_grad(const NetworkSpec& spec, const Vector& theta, const Vector& u,
                     const Vector& y_hat, Scalar alpha, Scalar beta, Vector& grad);

/// Loss value only (no gradient).
Scalar loss_value(const NetworkSpec& spec, const Vector& theta, const Vector& u,
                  const Vector& y_hat, Scalar alpha, Scalar beta);

}  // namespace phflow

#endif  // PHFLOW_NET_HPP
