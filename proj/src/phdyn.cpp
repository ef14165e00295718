// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/phdyn.hpp"

namespace phflow {

SpdDiagonal SpdDiagonal::scaled_identity(Scalar value) {
    if (!(value > 0.0)) throw ContractError("SpdDiagonal: scalar must be positive");
    SpdDiagonal m;
    m.scalar_ = value;
    return m;
}

SpdDiagonal SpdDiagonal::diagonal(Vector entries) {
    if (entries.size() == 0) throw ContractError("SpdDiagonal: empty diagonal");
    if (!(entries.minCoeff() > 0.0)) {
        throw ContractError("SpdDiagonal: all diagonal entries must be positive");
    }
    SpdDiagonal m;
    m.diag_ = std::move(entries);
    return m;
}

Vector SpdDiagonal::apply(const Vector& v) const {
    if (is_scalar()) return scalar_ * v;
    check_dimension(v.size(), "SpdDiagonal::apply");
    return diag_.cwiseProduct(v);
}

Vector SpdDiagonal::solve(const Vector& v) const {
    if (is_scalar()) return v / scalar_;
    check_dimension(v.size(), "SpdDiagonal::solve");
    return v.cwiseQuotient(diag_);
}

Scalar SpdDiagonal::quadratic(const Vector& v) const {
    if (is_scalar()) return scalar_ * v.squaredNorm();
    check_dimension(v.size(), "SpdDiagonal::quadratic");
    return v.dot(diag_.cwiseProduct(v));
}

void SpdDiagonal::check_dimension(Index n, const char* what) const {
    if (!is_scalar() && diag_.size() != n) {
        throw ContractError(std::string(what) + ": dimension mismatch");
    }
}

Vector PHState::packed() const {
    Vector xi(2 * theta.size());
    xi.head(theta.size()) = theta;
    xi.tail(omega.size()) = omega;
    return xi;
}

PHState PHState::unpack(const Vector& xi) {
    if (xi.size() % 2 != 0) throw ContractError("PHState: packed state must have even length");
    const Index p = xi.size() / 2;
    return PHState{xi.head(p), xi.tail(p)};
}

PHState PHState::zero(Index p) {
    return PHState{Vector::Zero(p), Vector::Zero(p)};
}

void PHConfig::validate() const {
    if (!(alpha >= 0.0)) throw ContractError("PHConfig: alpha must be >= 0");
    if (!(beta >= 0.0)) throw ContractError("PHConfig: beta must be >= 0");
    if (!(injection_gain >= 0.0)) throw ContractError("PHConfig: injection gain must be >= 0");
}

namespace {

void check_batch(const NetworkSpec& spec, const PHState& state, Batch batch, const char* what) {
    if (batch.empty()) throw ContractError(std::string(what) + ": empty batch");
    if (state.theta.size() != spec.parameter_count() || state.omega.size() != state.theta.size()) {
        throw ContractError(std::string(what) + ": state dimension mismatch");
    }
}

}  // namespace

Scalar potential_and_grad(const NetworkSpec& spec, const PHConfig& cfg, const Vector& theta,
                          Batch batch, Vector& grad) {
    if (batch.empty()) throw ContractError("potential_and_grad: empty batch");
    Scalar total = 0.0;
    grad = Vector::Zero(theta.size());
    Vector sample_grad;
    for (const Sample& s : batch) {
        total += loss_and_grad(spec, theta, s.input, s.label, cfg.alpha, cfg.beta, sample_grad);
        grad += sample_grad;
    }
    const Scalar inv_s = 1.0 / static_cast<Scalar>(batch.size());
    grad *= inv_s;
    return total * inv_s;
}

EnergyReport hamiltonian(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state,
                         Batch batch) {
    check_batch(spec, state, batch, "hamiltonian");
    cfg.validate();

    Scalar potential = 0.0;
    for (const Sample& s : batch) {
        potential += loss_value(spec, state.theta, s.input, s.label, cfg.alpha, cfg.beta);
    }
    potential /= static_cast<Scalar>(batch.size());

    const Vector thetadot = cfg.inertia.solve(state.omega);
    const Scalar kinetic = 0.5 * state.omega.dot(thetadot);
    const Scalar dissipation =
        -cfg.damping.quadratic(thetadot) - cfg.injection_gain * thetadot.squaredNorm();

    EnergyReport report;
    report.potential = potential;
    report.kinetic = kinetic;
    report.hamiltonian = potential + kinetic;
    report.dissipation_rate = dissipation;
    return report;
}

Vector grad_hamiltonian(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state,
                        Batch batch) {
    check_batch(spec, state, batch, "grad_hamiltonian");
    cfg.validate();

    const Index p = state.dim();
    Vector grad(2 * p);
    Vector theta_block;
    potential_and_grad(spec, cfg, state.theta, batch, theta_block);
    grad.head(p) = theta_block;
    grad.tail(p) = cfg.inertia.solve(state.omega);
    return grad;
}

Vector vector_field(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state,
                    Batch batch) {
    check_batch(spec, state, batch, "vector_field");
    cfg.validate();

    const Index p = state.dim();
    Vector grad_theta;
    potential_and_grad(spec, cfg, state.theta, batch, grad_theta);
    const Vector thetadot = cfg.inertia.solve(state.omega);

    Vector field(2 * p);
    field.head(p) = thetadot;
    field.tail(p) = -grad_theta - cfg.damping.apply(thetadot) - cfg.injection_gain * thetadot;
    return field;
}

Vector output_port(const PHConfig& cfg, const PHState& state) {
    return cfg.inertia.solve(state.omega);
}

}  // namespace phflow
