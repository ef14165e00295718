// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_LANDSCAPE_HPP
#define PHFLOW_LANDSCAPE_HPP

#include "phflow/types.hpp"

namespace phflow {

/// Configurable 2-D objective used by the optimizer-comparison experiment.
/// quadratic:   J = 1/2 (x - c)' diag(q) (x - c)
/// double_well: J = (x1^2 - 1)^2 + 0.5 x2^2 + tilt * x1
struct Landscape {
    enum class Kind { Quadratic, DoubleWell };

    Kind kind = Kind::Quadratic;
    Vector center = Vector::Zero(2);
    Vector curvature = Vector::Ones(2);
    Scalar tilt = 0.3;

    Scalar value(const Vector& x) const;
    Vector gradient(const Vector& x) const;

    void validate() const;
};

}  // namespace phflow

#endif  // PHFLOW_LANDSCAPE_HPP
