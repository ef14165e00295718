// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "phflow/net.hpp"
#include "test_util.hpp"

using namespace phflow;

TEST_CASE("parameter count follows p = sum h_i (1 + h_{i-1})") {
    CHECK(NetworkSpec::dense({2, 2}, Activation::identity()).parameter_count() == 6);
    CHECK(NetworkSpec::dense({1, 1}, Activation::identity()).parameter_count() == 2);
    // The vector-field reconstruction network.
    CHECK(NetworkSpec::dense({2, 16, 16, 2}, Activation::softplus(10.0)).parameter_count() == 354);
}

TEST_CASE("identity single layer reproduces W u + b") {
    const NetworkSpec spec = NetworkSpec::dense({2, 2}, Activation::identity());
    std::vector<LayerParams> layers(1);
    layers[0].weights = Matrix::Identity(2, 2);
    layers[0].bias = Vector::Zero(2);
    const Vector theta = flatten_params(spec, layers);

    Vector u(2);
    u << 0.6, 0.6;
    const Vector y = forward(spec, theta, u);
    CHECK(y[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("softplus output layer gives ln(2)/gamma at zero input") {
    const NetworkSpec spec = NetworkSpec::dense({1, 1}, Activation::softplus(10.0),
                                                Activation::softplus(10.0));
    Vector theta(2);
    theta << 1.0, 0.0;  // w = 1, b = 0
    Vector u(1);
    u << 0.0;
    const Vector y = forward(spec, theta, u);
    CHECK(y[0] == doctest::Approx(std::log(2.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("softplus is positive, monotone, and within ln2/gamma of relu") {
    const Scalar gamma = 10.0;
    Scalar prev = -1.0;
    for (Scalar x = -5.0; x <= 5.0; x += 0.01) {
        const Scalar s = softplus_value(x, gamma);
        CHECK(s > 0.0);
        CHECK(s > prev);
        prev = s;
        const Scalar relu = std::max(0.0, x);
        CHECK(std::abs(s - relu) <= std::log(2.0) / gamma + 1e-15);
    }
}

TEST_CASE("softplus large-argument branch stays finite and accurate") {
    CHECK(std::isfinite(softplus_value(500.0, 10.0)));
    CHECK(softplus_value(500.0, 10.0) == doctest::Approx(500.0));
    CHECK(softplus_value(-500.0, 10.0) == doctest::Approx(0.0).epsilon(1e-300));
    CHECK(softplus_slope(500.0, 10.0) == doctest::Approx(1.0));
    CHECK(softplus_slope(-500.0, 10.0) == doctest::Approx(0.0));
}

TEST_CASE("flatten/unflatten round-trips bit-identically") {
    const NetworkSpec spec = NetworkSpec::dense({3, 4, 2}, Activation::softplus(3.0));
    SplitMix64 rng(11);
    std::vector<LayerParams> layers(2);
    layers[0].weights = Matrix::NullaryExpr(4, 3, [&](Index, Index) { return rng.next_normal(); });
    layers[0].bias = Vector::NullaryExpr(4, [&](Index) { return rng.next_normal(); });
    layers[1].weights = Matrix::NullaryExpr(2, 4, [&](Index, Index) { return rng.next_normal(); });
    layers[1].bias = Vector::NullaryExpr(2, [&](Index) { return rng.next_normal(); });

    const Vector theta = flatten_params(spec, layers);
    REQUIRE(theta.size() == spec.parameter_count());
    const auto back = unflatten_params(spec, theta);
    for (int i = 0; i < 2; ++i) {
        CHECK((back[i].weights.array() == layers[i].weights.array()).all());
        CHECK((back[i].bias.array() == layers[i].bias.array()).all());
    }
    // And the flat layout is row-major weights followed by bias.
    CHECK(theta[0] == layers[0].weights(0, 0));
    CHECK(theta[1] == layers[0].weights(0, 1));
    CHECK(theta[2] == layers[0].weights(0, 2));
    CHECK(theta[12] == layers[0].bias[0]);
}

TEST_CASE("perfect fit with beta = 0 gives zero loss and zero gradient") {
    const NetworkSpec spec = NetworkSpec::dense({2, 2}, Activation::identity());
    std::vector<LayerParams> layers(1);
    layers[0].weights = Matrix::Identity(2, 2);
    layers[0].bias = Vector::Zero(2);
    const Vector theta = flatten_params(spec, layers);

    Vector u(2), y_hat(2);
    u << 0.3, -0.7;
    y_hat << 0.3, -0.7;
    Vector grad;
    const Scalar loss = loss_and_grad(spec, theta, u, y_hat, 1.0, 0.0, grad);
    CHECK(loss == 0.0);
    CHECK(grad.norm() == 0.0);
}

TEST_CASE("affine classifier gradient has the residual outer-product structure") {
    // Single affine layer: grad wrt row r of (W, b) is -alpha * r_r * (u, 1) + beta * theta.
    const NetworkSpec spec = NetworkSpec::dense({2, 2}, Activation::identity());
    SplitMix64 rng(5);
    const Vector theta = testutil::random_vector(rng, 6, -2.0, 2.0);
    Vector u(2), y_hat(2);
    u << 0.6, 0.6;
    y_hat << 1.0, 0.0;
    const Scalar alpha = 1.3, beta = 0.2;

    Vector grad;
    loss_and_grad(spec, theta, u, y_hat, alpha, beta, grad);

    const Vector y = forward(spec, theta, u);
    const Vector r = y_hat - y;
    Vector expected(6);
    expected << -alpha * r[0] * u[0], -alpha * r[0] * u[1],  // W row 1
        -alpha * r[1] * u[0], -alpha * r[1] * u[1],          // W row 2
        -alpha * r[0], -alpha * r[1];                        // biases
    expected += beta * theta;
    CHECK((grad - expected).norm() < 1e-14);
}

TEST_CASE("analytic gradient matches the finite-difference oracle") {
    const NetworkSpec spec = NetworkSpec::dense({2, 3, 2}, Activation::softplus(4.0));
    SplitMix64 rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector theta = testutil::random_vector(rng, spec.parameter_count(), -1.5, 1.5);
        const Vector u = testutil::random_vector(rng, 2, -1.0, 1.0);
        const Vector y_hat = testutil::random_vector(rng, 2, -1.0, 1.0);
        const Scalar alpha = 0.5 + rng.next_double();
        const Scalar beta = 0.5 * rng.next_double();

        Vector grad;
        loss_and_grad(spec, theta, u, y_hat, alpha, beta, grad);
        const Vector fd = testutil::fd_gradient(spec, theta, u, y_hat, alpha, beta);
        for (Index i = 0; i < grad.size(); ++i) {
            CHECK(testutil::close(grad[i], fd[i], 1e-6, 1e-8));
        }
    }
}

TEST_CASE("forward is pure: repeated evaluation is bit-identical") {
    const NetworkSpec spec = NetworkSpec::dense({2, 5, 3}, Activation::softplus(10.0));
    SplitMix64 rng(9);
    const Vector theta = testutil::random_vector(rng, spec.parameter_count(), -1.0, 1.0);
    const Vector u = testutil::random_vector(rng, 2, -1.0, 1.0);
    const Vector y1 = forward(spec, theta, u);
    const Vector y2 = forward(spec, theta, u);
    CHECK((y1.array() == y2.array()).all());
}

TEST_CASE("dimension mismatches raise contract errors") {
    const NetworkSpec spec = NetworkSpec::dense({2, 2}, Activation::identity());
    const Vector theta = Vector::Zero(6);
    Vector grad;
    CHECK_THROWS_AS(forward(spec, theta, Vector::Zero(3)), ContractError);
    CHECK_THROWS_AS(forward(spec, Vector::Zero(5), Vector::Zero(2)), ContractError);
    CHECK_THROWS_AS(loss_and_grad(spec, theta, Vector::Zero(2), Vector::Zero(3), 1, 0, grad),
                    ContractError);
    CHECK_THROWS_AS(NetworkSpec::dense({2}, Activation::identity()), ContractError);
    CHECK_THROWS_AS(NetworkSpec::dense({2, 0}, Activation::identity()), ContractError);
    CHECK_THROWS_AS(
        NetworkSpec::dense({1, 1}, Activation::identity(), Activation::softplus(-2.0)),
        ContractError);
}
