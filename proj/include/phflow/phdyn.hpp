// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_PHDYN_HPP
#define PHFLOW_PHDYN_HPP

#include "phflow/net.hpp"
#include "phflow/types.hpp"

namespace phflow {

/// Symmetric positive definite matrix restricted to scalar*I or diagonal form.
/// Scalar form adapts to any dimension; diagonal form is dimension-checked at use.
class SpdDiagonal {
public:
    SpdDiagonal() = default;

    static SpdDiagonal scaled_identity(Scalar value);
    static SpdDiagonal diagonal(Vector entries);

    bool is_scalar() const { return diag_.size() == 0; }
    Scalar scalar_value() const { return scalar_; }
    const Vector& diagonal_entries() const { return diag_; }

    Vector apply(const Vector& v) const;
    Vector solve(const Vector& v) const;
    /// v' A v
    Scalar quadratic(const Vector& v) const;

    void check_dimension(Index n, const char* what) const;

private:
    Scalar scalar_ = 1.0;
    Vector diag_;  // empty means scalar * I
};

/// State xi = (theta, omega) of the parameter dynamics; omega = M * thetadot.
struct PHState {
    Vector theta;
    Vector omega;

    Index dim() const { return theta.size(); }

    /// Concatenation (theta, omega), positions first.
    Vector packed() const;
    static PHState unpack(const Vector& xi);
    static PHState zero(Index p);
};

/// The triplet (f, F, J*) minus f: loss scales, damping B, inertia M, and the
/// optional damping-injection gain k (input v = -k * thetadot through the
/// velocity port).
struct PHConfig {
    Scalar alpha = 1.0;
    Scalar beta = 0.0;
    SpdDiagonal damping = SpdDiagonal::scaled_identity(1.0);
    SpdDiagonal inertia = SpdDiagonal::scaled_identity(1.0);
    Scalar injection_gain = 0.0;

    void validate() const;
};

/// Energy split of the augmented Hamiltonian at one state.
struct EnergyReport {
    Scalar hamiltonian;       // J* = potential + kinetic
    Scalar potential;         // batch-averaged sample losses
    Scalar kinetic;           // 1/2 * omega' M^-1 omega
    Scalar dissipation_rate;  // -thetadot' B thetadot - k * thetadot' thetadot
};

/// J*(batch, xi) = (1/s) sum_i 1/2[alpha ||y_i - f(u_i,theta)||^2 + beta theta'theta]
///                 + 1/2 omega' M^-1 omega.
EnergyReport hamiltonian(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state,
                         Batch batch);

/// (d_theta J*, d_omega J*); the theta block is the batch-averaged loss
/// gradient, the omega block is M^-1 omega. Length 2p.
Vector grad_hamiltonian(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state,
                        Batch batch);

/// xi_dot = F dJ* + g v with F = [[0, I], [-I, -B]] and v = -k thetadot:
///   theta_dot = M^-1 omega
///   omega_dot = -d_theta J* - (B + k I) M^-1 omega.
/// The block structure is applied operator-style; no 2p x 2p matrix is formed.
Vector vector_field(const NetworkSpec& spec, const PHConfig& cfg, const PHState& state,
                    Batch batch);

/// Port output z = thetadot = M^-1 omega.
Vector output_port(const PHConfig& cfg, const PHState& state);

/// Batch-averaged potential gradient (theta block only); shared by the flow
/// and the gradient-descent baseline. The reduction is a fixed-order
/// sequential sum over the sample index.
Scalar potential_and_grad(const NetworkSpec& spec, const PHConfig& cfg, const Vector& theta,
                          Batch batch, Vector& grad);

}  // namespace phflow

#endif  // PHFLOW_PHDYN_HPP
