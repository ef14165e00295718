// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/net.hpp"

#include <cmath>
#include <string>

namespace phflow {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>;
using RowMajorMutableMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>;

Scalar apply_activation(const Activation& act, Scalar x) {
    return act.kind == ActivationKind::Identity ? x : softplus_value(x, act.gamma);
}

Scalar activation_slope(const Activation& act, Scalar x) {
    return act.kind == ActivationKind::Identity ? 1.0 : softplus_slope(x, act.gamma);
}

}  // namespace

Scalar softplus_value(Scalar x, Scalar gamma) {
    const Scalar gx = gamma * x;
    // For gx > 30 the direct form overflows long before it loses accuracy.
    if (gx > 30.0) return x + std::log1p(std::exp(-gx)) / gamma;
    return std::log1p(std::exp(gx)) / gamma;
}

Scalar softplus_slope(Scalar x, Scalar gamma) {
    // Logistic in gamma*x; saturates gracefully at 0 and 1.
    return 1.0 / (1.0 + std::exp(-gamma * x));
}

Index NetworkSpec::parameter_count() const {
    Index p = 0;
    for (std::size_t i = 1; i < layer_widths.size(); ++i) {
        p += layer_widths[i] * (1 + layer_widths[i - 1]);
    }
    return p;
}

void NetworkSpec::validate() const {
    if (layer_widths.size() < 2) {
        throw ContractError("NetworkSpec: need at least input and output widths");
    }
    for (Index w : layer_widths) {
        if (w < 1) throw ContractError("NetworkSpec: all layer widths must be >= 1");
    }
    if (activations.size() != layer_widths.size() - 1) {
        throw ContractError("NetworkSpec: need exactly one activation per layer");
    }
    for (const Activation& a : activations) {
        if (a.kind == ActivationKind::Softplus && !(a.gamma > 0.0)) {
            throw ContractError("NetworkSpec: softplus sharpness must be positive");
        }
    }
}

NetworkSpec NetworkSpec::dense(std::vector<Index> widths, Activation hidden, Activation output) {
    NetworkSpec spec;
    spec.layer_widths = std::move(widths);
    const Index l = static_cast<Index>(spec.layer_widths.size()) - 1;
    spec.activations.assign(static_cast<std::size_t>(l > 0 ? l : 0), hidden);
    if (!spec.activations.empty()) spec.activations.back() = output;
    spec.validate();
    return spec;
}

Vector flatten_params(const NetworkSpec& spec, const std::vector<LayerParams>& layers) {
    spec.validate();
    if (static_cast<Index>(layers.size()) != spec.layer_count()) {
        throw ContractError("flatten_params: layer count mismatch");
    }
    Vector theta(spec.parameter_count());
    Index offset = 0;
    for (Index i = 0; i < spec.layer_count(); ++i) {
        const Index rows = spec.layer_widths[i + 1];
        const Index cols = spec.layer_widths[i];
        const LayerParams& lp = layers[static_cast<std::size_t>(i)];
        if (lp.weights.rows() != rows || lp.weights.cols() != cols || lp.bias.size() != rows) {
            throw ContractError("flatten_params: layer " + std::to_string(i) + " shape mismatch");
        }
        RowMajorMutableMap(theta.data() + offset, rows, cols) = lp.weights;
        offset += rows * cols;
        theta.segment(offset, rows) = lp.bias;
        offset += rows;
    }
    return theta;
}

std::vector<LayerParams> unflatten_params(const NetworkSpec& spec, const Vector& theta) {
    spec.validate();
    if (theta.size() != spec.parameter_count()) {
        throw ContractError("unflatten_params: parameter vector has wrong length");
    }
    std::vector<LayerParams> layers;
    layers.reserve(static_cast<std::size_t>(spec.layer_count()));
    Index offset = 0;
    for (Index i = 0; i < spec.layer_count(); ++i) {
        const Index rows = spec.layer_widths[i + 1];
        const Index cols = spec.layer_widths[i];
        LayerParams lp;
        lp.weights = RowMajorMap(theta.data() + offset, rows, cols);
        offset += rows * cols;
        lp.bias = theta.segment(offset, rows);
        offset += rows;
        layers.push_back(std::move(lp));
    }
    return layers;
}

Vector forward(const NetworkSpec& spec, const Vector& theta, const Vector& u) {
    spec.validate();
    if (theta.size() != spec.parameter_count()) {
        throw ContractError("forward: parameter vector has wrong length");
    }
    if (u.size() != spec.input_dim()) {
        throw ContractError("forward: input dimension mismatch");
    }
    Vector y = u;
    Index offset = 0;
    for (Index i = 0; i < spec.layer_count(); ++i) {
        const Index rows = spec.layer_widths[i + 1];
        const Index cols = spec.layer_widths[i];
        RowMajorMap W(theta.data() + offset, rows, cols);
        offset += rows * cols;
        Vector z = W * y + theta.segment(offset, rows);
        offset += rows;
        const Activation& act = spec.activations[static_cast<std::size_t>(i)];
        for (Index j = 0; j < rows; ++j) z[j] = apply_activation(act, z[j]);
        y = std::move(z);
    }
    return y;
}

namespace {

/// Forward pass that keeps layer inputs and pre-activations for the backward sweep.
struct ForwardTrace {
    std::vector<Vector> layer_inputs;   // y_0 .. y_{l-1}
    std::vector<Vector> preactivations; // z_1 .. z_l
    Vector output;
};

ForwardTrace traced_forward(const NetworkSpec& spec, const Vector& theta, const Vector& u) {
    ForwardTrace trace;
    trace.layer_inputs.reserve(static_cast<std::size_t>(spec.layer_count()));
    trace.preactivations.reserve(static_cast<std::size_t>(spec.layer_count()));
    Vector y = u;
    Index offset = 0;
    for (Index i = 0; i < spec.layer_count(); ++i) {
        const Index rows = spec.layer_widths[i + 1];
        const Index cols = spec.layer_widths[i];
        RowMajorMap W(theta.data() + offset, rows, cols);
        offset += rows * cols;
        Vector z = W * y + theta.segment(offset, rows);
        offset += rows;
        trace.layer_inputs.push_back(std::move(y));
        const Activation& act = spec.activations[static_cast<std::size_t>(i)];
        Vector a(rows);
        for (Index j = 0; j < rows; ++j) a[j] = apply_activation(act, z[j]);
        trace.preactivations.push_back(std::move(z));
        y = std::move(a);
    }
    trace.output = std::move(y);
    return trace;
}

}  // namespace

Scalar loss_and_grad(const NetworkSpec& spec, const Vector& theta, const Vector& u,
                     const Vector& y_hat, Scalar alpha, Scalar beta, Vector& grad) {
    spec.validate();
    if (theta.size() != spec.parameter_count()) {
        throw ContractError("loss_and_grad: parameter vector has wrong length");
    }
    if (u.size() != spec.input_dim()) {
        throw ContractError("loss_and_grad: input dimension mismatch");
    }
    if (y_hat.size() != spec.output_dim()) {
        throw ContractError("loss_and_grad: label dimension mismatch");
    }

    const ForwardTrace trace = traced_forward(spec, theta, u);
    const Vector residual = y_hat - trace.output;
    const Scalar loss = 0.5 * (alpha * residual.squaredNorm() + beta * theta.squaredNorm());

    grad = beta * theta;

    // Reverse sweep: delta_i = dJ/dz_i, starting from dJ/dy_l = -alpha * residual.
    const Index l = spec.layer_count();
    Vector delta = -alpha * residual;
    Index layer_end = theta.size();
    for (Index i = l - 1; i >= 0; --i) {
        const Index rows = spec.layer_widths[i + 1];
        const Index cols = spec.layer_widths[i];
        const Activation& act = spec.activations[static_cast<std::size_t>(i)];
        const Vector& z = trace.preactivations[static_cast<std::size_t>(i)];
        for (Index j = 0; j < rows; ++j) delta[j] *= activation_slope(act, z[j]);

        const Index bias_off = layer_end - rows;
        const Index weight_off = bias_off - rows * cols;
        grad.segment(bias_off, rows) += delta;
        RowMajorMutableMap gW(grad.data() + weight_off, rows, cols);
        const Vector& y_prev = trace.layer_inputs[static_cast<std::size_t>(i)];
        gW.noalias() += delta * y_prev.transpose();

        if (i > 0) {
            RowMajorMap W(theta.data() + weight_off, rows, cols);
            delta = W.transpose() * delta;
        }
        layer_end = weight_off;
    }
    return loss;
}

Scalar loss_value(const NetworkSpec& spec, const Vector& theta, const Vector& u,
                  const Vector& y_hat, Scalar alpha, Scalar beta) {
    const Vector y = forward(spec, theta, u);
    if (y_hat.size() != y.size()) {
        throw ContractError("loss_value: label dimension mismatch");
    }
    const Vector residual = y_hat - y;
    return 0.5 * (alpha * residual.squaredNorm() + beta * theta.squaredNorm());
}

}  // namespace phflow
