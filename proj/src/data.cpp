// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "phflow/csv.hpp"
#include "phflow/rng.hpp"

namespace phflow {

void Dataset::validate() const {
    const Index n_u = input_dim();
    const Index n_y = label_dim();
    for (const Sample& s : samples) {
        if (s.input.size() != n_u || s.label.size() != n_y) {
            throw ContractError("Dataset: inconsistent sample dimensions");
        }
    }
    if (split) {
        std::vector<bool> seen(static_cast<std::size_t>(size()), false);
        for (const auto* part : {&split->train, &split->test}) {
            for (Index i : *part) {
                if (i < 0 || i >= size() || seen[static_cast<std::size_t>(i)]) {
                    throw ContractError("Dataset: split indices must partition 0..s-1");
                }
                seen[static_cast<std::size_t>(i)] = true;
            }
        }
        if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
            throw ContractError("Dataset: split indices must partition 0..s-1");
        }
    }
}

namespace {

Dataset take_subset(const Dataset& dataset, const std::vector<Index>& indices) {
    Dataset out;
    out.seed = dataset.seed;
    out.samples.reserve(indices.size());
    for (Index i : indices) out.samples.push_back(dataset.samples[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

Dataset Dataset::train_subset() const {
    if (!split) throw ContractError("Dataset: no split set");
    return take_subset(*this, split->train);
}

Dataset Dataset::test_subset() const {
    if (!split) throw ContractError("Dataset: no split set");
    return take_subset(*this, split->test);
}

Dataset gaussian_blobs(std::uint64_t seed, Index n_per_class, const Vector& mean1,
                       const Vector& mean2, Scalar sigma) {
    if (n_per_class < 1) throw ContractError("gaussian_blobs: n_per_class must be positive");
    if (!(sigma > 0.0)) throw ContractError("gaussian_blobs: sigma must be positive");
    if (mean1.size() != mean2.size()) throw ContractError("gaussian_blobs: mean dimensions differ");

    SplitMix64 rng(seed);
    const Index dim = mean1.size();

    Dataset ds;
    ds.seed = seed;
    ds.samples.reserve(static_cast<std::size_t>(2 * n_per_class));
    for (int cls = 0; cls < 2; ++cls) {
        const Vector& mean = cls == 0 ? mean1 : mean2;
        Vector label = Vector::Zero(2);
        label[cls] = 1.0;
        for (Index i = 0; i < n_per_class; ++i) {
            Vector x(dim);
            for (Index d = 0; d < dim; ++d) x[d] = mean[d] + sigma * rng.next_normal();
            ds.samples.push_back(Sample{std::move(x), label});
        }
    }

    // Fisher-Yates on the same stream.
    for (std::size_t i = ds.samples.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(ds.samples[i], ds.samples[j]);
    }
    return ds;
}

Dataset split_dataset(const Dataset& dataset, Scalar ratio_train, std::uint64_t seed) {
    if (!(ratio_train > 0.0 && ratio_train < 1.0)) {
        throw ContractError("split_dataset: ratio must lie in (0, 1)");
    }
    const Index s = dataset.size();
    if (s == 0) throw ContractError("split_dataset: empty dataset");
    const Index n_train =
        static_cast<Index>(std::floor(ratio_train * static_cast<Scalar>(s) + 0.5));

    std::vector<Index> perm(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) perm[static_cast<std::size_t>(i)] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(perm[i], perm[j]);
    }

    Dataset out = dataset;
    DatasetSplit split;
    split.train.assign(perm.begin(), perm.begin() + n_train);
    split.test.assign(perm.begin() + n_train, perm.end());
    // Sorted index lists keep the subsets in dataset order.
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    out.split = std::move(split);
    out.validate();
    return out;
}

Vector duffing_field(const Vector& u) {
    if (u.size() != 2) throw ContractError("duffing_field: state must be 2-dimensional");
    Vector du(2);
    du[0] = u[1];
    du[1] = -u[0] - u[1] - 0.5 * u[0] * u[0] * u[0];
    return du;
}

void DuffingSpec::validate() const {
    if (!(x_end > x_start)) throw ContractError("DuffingSpec: x_end must exceed x_start");
    if (n_samples < 2) throw ContractError("DuffingSpec: need at least two samples");
    if (u0.size() != 2) throw ContractError("DuffingSpec: u0 must be 2-dimensional");
}

Dataset duffing_dataset(const DuffingSpec& spec, const IntegratorConfig& cfg) {
    spec.validate();

    IntegratorConfig tight = cfg;
    tight.method = OdeMethod::Rk45Adaptive;
    tight.rtol = std::min(cfg.rtol, 1e-10);
    tight.atol = std::min(cfg.atol, 1e-12);
    const Scalar dx = (spec.x_end - spec.x_start) / static_cast<Scalar>(spec.n_samples);
    tight.record_every = dx;

    const FieldFn field = [](Scalar, const Vector& u) { return duffing_field(u); };
    const OdeSolution sol = integrate(field, spec.u0, spec.x_start, spec.x_end, tight);
    if (sol.states.size() != static_cast<std::size_t>(spec.n_samples) + 1) {
        throw DivergenceError("duffing_dataset: unexpected sample count", spec.x_end);
    }

    Dataset ds;
    ds.samples.reserve(static_cast<std::size_t>(spec.n_samples));
    for (Index i = 0; i < spec.n_samples; ++i) {
        const Vector& u_i = sol.states[static_cast<std::size_t>(i)];
        const Vector& u_next = sol.states[static_cast<std::size_t>(i) + 1];
        ds.samples.push_back(Sample{u_i, (u_next - u_i) / dx});
    }
    return ds;
}

void write_dataset_csv(const Dataset& dataset, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> header;
    for (Index i = 0; i < dataset.input_dim(); ++i) header.push_back("u_" + std::to_string(i + 1));
    for (Index i = 0; i < dataset.label_dim(); ++i) header.push_back("y_" + std::to_string(i + 1));
    csv.header(header);
    for (const Sample& s : dataset.samples) {
        std::vector<Scalar> row;
        row.insert(row.end(), s.input.data(), s.input.data() + s.input.size());
        row.insert(row.end(), s.label.data(), s.label.data() + s.label.size());
        csv.row(row);
    }
}

void write_dataset_manifest(const Dataset& dataset, const std::string& generator,
                            const std::string& parameters_json, const std::string& path) {
    nlohmann::json manifest{{"generator", generator},
                            {"seed", dataset.seed},
                            {"samples", dataset.size()},
                            {"input_dim", dataset.input_dim()},
                            {"label_dim", dataset.label_dim()},
                            {"parameters", nlohmann::json::parse(parameters_json)}};
    if (dataset.split) {
        manifest["split"] = {{"train", dataset.split->train.size()},
                             {"test", dataset.split->test.size()}};
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset manifest: " + path);
    out << manifest.dump(2) << '\n';
}

Dataset read_dataset_csv(const std::string& path, Index input_dim, Index label_dim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty dataset file: " + path);

    Dataset ds;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vector u(input_dim), y(label_dim);
        for (Index i = 0; i < input_dim + label_dim; ++i) {
            if (!std::getline(ss, cell, ',')) {
                throw IoError("malformed dataset row in " + path);
            }
            const Scalar v = std::stod(cell);
            if (i < input_dim) {
                u[i] = v;
            } else {
                y[i - input_dim] = v;
            }
        }
        ds.samples.push_back(Sample{std::move(u), std::move(y)});
    }
    ds.validate();
    return ds;
}

}  // namespace phflow
