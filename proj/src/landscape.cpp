// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/landscape.hpp"

namespace phflow {

void Landscape::validate() const {
    if (center.size() != 2 || curvature.size() != 2) {
        throw ContractError("Landscape: center and curvature must be 2-dimensional");
    }
    if (kind == Kind::Quadratic && !(curvature.minCoeff() > 0.0)) {
        throw ContractError("Landscape: quadratic curvature must be positive");
    }
}

Scalar Landscape::value(const Vector& x) const {
    if (x.size() != 2) throw ContractError("Landscape: point must be 2-dimensional");
    if (kind == Kind::Quadratic) {
        const Vector d = x - center;
        return 0.5 * (curvature[0] * d[0] * d[0] + curvature[1] * d[1] * d[1]);
    }
    const Scalar w = x[0] * x[0] - 1.0;
    return w * w + 0.5 * x[1] * x[1] + tilt * x[0];
}

Vector Landscape::gradient(const Vector& x) const {
    if (x.size() != 2) throw ContractError("Landscape: point must be 2-dimensional");
    Vector g(2);
    if (kind == Kind::Quadratic) {
        g[0] = curvature[0] * (x[0] - center[0]);
        g[1] = curvature[1] * (x[1] - center[1]);
        return g;
    }
    g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0) + tilt;
    g[1] = x[1];
    return g;
}

}  // namespace phflow
