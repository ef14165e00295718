// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_TYPES_HPP
#define PHFLOW_TYPES_HPP

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phflow {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// One labeled training pair (u_hat, y_hat).
struct Sample {
    Vector input;
    Vector label;
};

/// A contiguous view over samples; the unit all batch operations consume.
using Batch = std::span<const Sample>;

/// Violated precondition or dimension mismatch in a public API call.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integration exceeded its step budget without reaching the end time.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, Scalar time)
        : std::runtime_error(what), time_(time) {}
    Scalar time() const { return time_; }

private:
    Scalar time_;
};

/// A state component became NaN or infinite during integration.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, Scalar time)
        : std::runtime_error(what), time_(time) {}
    Scalar time() const { return time_; }

private:
    Scalar time_;
};

/// Malformed configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure while writing or reading artifacts (CLI exit code 4).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phflow

#endif  // PHFLOW_TYPES_HPP
