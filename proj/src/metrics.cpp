// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/metrics.hpp"

#include <algorithm>

#include "phflow/csv.hpp"

namespace phflow {

Scalar relative_error(const Vector& y_hat, const Vector& y_final) {
    if (y_hat.size() != y_final.size()) {
        throw ContractError("relative_error: dimension mismatch");
    }
    const Scalar denom = y_hat.squaredNorm();
    if (!(denom > 0.0)) {
        throw ContractError("relative_error: undefined for a zero-norm label");
    }
    return (y_hat - y_final).squaredNorm() / denom;
}

Index argmax_lowest(const Vector& v) {
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

Scalar accuracy(const NetworkSpec& spec, const Vector& theta, Batch samples) {
    if (samples.empty()) throw ContractError("accuracy: empty sample set");
    Index correct = 0;
    for (const Sample& s : samples) {
        const Vector y = forward(spec, theta, s.input);
        if (argmax_lowest(y) == argmax_lowest(s.label)) ++correct;
    }
    return static_cast<Scalar>(correct) / static_cast<Scalar>(samples.size());
}

namespace {

std::vector<Scalar> linspace(Scalar lo, Scalar hi, Index n) {
    if (n < 1) throw ContractError("grid resolution must be positive");
    std::vector<Scalar> pts(static_cast<std::size_t>(n));
    if (n == 1) {
        pts[0] = lo;
        return pts;
    }
    const Scalar step = (hi - lo) / static_cast<Scalar>(n - 1);
    for (Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = lo + step * i;
    pts.back() = hi;
    return pts;
}

}  // namespace

ErrorField error_field(const NetworkSpec& spec, const Vector& theta, const Rectangle& domain,
                       const GridResolution& resolution, const TrueField& field) {
    ErrorField out;
    out.grid_x1 = linspace(domain.x1_min, domain.x1_max, resolution.n1);
    out.grid_x2 = linspace(domain.x2_min, domain.x2_max, resolution.n2);
    out.values.resize(resolution.n1, resolution.n2);

    Scalar sum = 0.0;
    Scalar max = 0.0;
    Vector u(2);
    for (Index i = 0; i < resolution.n1; ++i) {
        for (Index j = 0; j < resolution.n2; ++j) {
            u[0] = out.grid_x1[static_cast<std::size_t>(i)];
            u[1] = out.grid_x2[static_cast<std::size_t>(j)];
            const Scalar e = (field(u) - forward(spec, theta, u)).norm();
            out.values(i, j) = e;
            sum += e;
            max = std::max(max, e);
        }
    }
    out.mean = sum / static_cast<Scalar>(resolution.n1 * resolution.n2);
    out.max = max;
    return out;
}

Scalar mean_field_error(const NetworkSpec& spec, const Vector& theta, Batch samples,
                        const TrueField& field) {
    if (samples.empty()) throw ContractError("mean_field_error: empty sample set");
    Scalar sum = 0.0;
    for (const Sample& s : samples) {
        sum += (field(s.input) - forward(spec, theta, s.input)).norm();
    }
    return sum / static_cast<Scalar>(samples.size());
}

DecisionGrid decision_grid(const NetworkSpec& spec, const Vector& theta, const Rectangle& domain,
                           const GridResolution& resolution) {
    DecisionGrid out;
    out.grid_x1 = linspace(domain.x1_min, domain.x1_max, resolution.n1);
    out.grid_x2 = linspace(domain.x2_min, domain.x2_max, resolution.n2);
    out.classes.resize(resolution.n1, resolution.n2);
    Vector u(2);
    for (Index i = 0; i < resolution.n1; ++i) {
        for (Index j = 0; j < resolution.n2; ++j) {
            u[0] = out.grid_x1[static_cast<std::size_t>(i)];
            u[1] = out.grid_x2[static_cast<std::size_t>(j)];
            out.classes(i, j) = argmax_lowest(forward(spec, theta, u));
        }
    }
    return out;
}

void write_error_field_csv(const ErrorField& field, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"x1", "x2", "value"});
    for (std::size_t i = 0; i < field.grid_x1.size(); ++i) {
        for (std::size_t j = 0; j < field.grid_x2.size(); ++j) {
            csv.row({field.grid_x1[i], field.grid_x2[j],
                     field.values(static_cast<Index>(i), static_cast<Index>(j))});
        }
    }
}

void write_decision_grid_csv(const DecisionGrid& grid, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"x1", "x2", "class"});
    for (std::size_t i = 0; i < grid.grid_x1.size(); ++i) {
        for (std::size_t j = 0; j < grid.grid_x2.size(); ++j) {
            csv.row({grid.grid_x1[i], grid.grid_x2[j],
                     static_cast<Scalar>(grid.classes(static_cast<Index>(i),
                                                      static_cast<Index>(j)))});
        }
    }
}

}  // namespace phflow
