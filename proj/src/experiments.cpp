// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "phflow/experiments.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "phflow/csv.hpp"
#include "phflow/rng.hpp"

namespace phflow {

namespace {

Vector parse_vector(const Json& j) {
    Vector v(static_cast<Index>(j.size()));
    Index i = 0;
    for (const auto& x : j) v[i++] = x.get<Scalar>();
    return v;
}

Json vector_to_json(const Vector& v) {
    Json j = Json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Activation parse_activation(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return Activation::identity();
    if (kind == "softplus") return Activation::softplus(j.at("gamma").get<Scalar>());
    throw ConfigError("unknown activation kind: " + kind);
}

NetworkSpec parse_network(const Json& j) {
    std::vector<Index> widths;
    for (const auto& w : j.at("layer_widths")) widths.push_back(w.get<Index>());
    return NetworkSpec::dense(std::move(widths), parse_activation(j.at("hidden_activation")),
                              parse_activation(j.at("output_activation")));
}

SpdDiagonal parse_spd(const Json& j, const char* what) {
    if (j.is_number()) return SpdDiagonal::scaled_identity(j.get<Scalar>());
    if (j.is_array()) return SpdDiagonal::diagonal(parse_vector(j));
    throw ConfigError(std::string(what) + " must be a positive number or an array");
}

PHConfig parse_ph(const Json& j) {
    PHConfig cfg;
    cfg.alpha = j.value("alpha", 1.0);
    cfg.beta = j.value("beta", 0.0);
    if (j.contains("damping")) cfg.damping = parse_spd(j.at("damping"), "ph.damping");
    if (j.contains("inertia")) cfg.inertia = parse_spd(j.at("inertia"), "ph.inertia");
    cfg.injection_gain = j.value("injection_gain", 0.0);
    cfg.validate();
    return cfg;
}

IntegratorConfig parse_integrator(const Json& j) {
    IntegratorConfig cfg;
    const std::string method = j.at("method").get<std::string>();
    if (method == "rk4_fixed") {
        cfg.method = OdeMethod::Rk4Fixed;
    } else if (method == "rk45_adaptive") {
        cfg.method = OdeMethod::Rk45Adaptive;
    } else {
        throw ConfigError("unknown integrator method: " + method);
    }
    cfg.dt = j.at("dt").get<Scalar>();
    cfg.rtol = j.at("rtol").get<Scalar>();
    cfg.atol = j.at("atol").get<Scalar>();
    cfg.max_steps = j.at("max_steps").get<long>();
    cfg.record_every = j.at("record_every").get<Scalar>();
    cfg.validate();
    return cfg;
}

Rectangle parse_rectangle(const Json& j) {
    return Rectangle{j.at("x1_min").get<Scalar>(), j.at("x1_max").get<Scalar>(),
                     j.at("x2_min").get<Scalar>(), j.at("x2_max").get<Scalar>()};
}

GridResolution parse_resolution(const Json& j) {
    return GridResolution{j.at("n1").get<Index>(), j.at("n2").get<Index>()};
}

Landscape parse_landscape(const Json& j) {
    Landscape l;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quadratic") {
        l.kind = Landscape::Kind::Quadratic;
    } else if (kind == "double_well") {
        l.kind = Landscape::Kind::DoubleWell;
    } else {
        throw ConfigError("unknown landscape kind: " + kind);
    }
    l.center = parse_vector(j.at("center"));
    l.curvature = parse_vector(j.at("curvature"));
    l.tilt = j.at("tilt").get<Scalar>();
    l.validate();
    return l;
}

PHState parse_initial_state(const Json& cfg, Index p) {
    const Vector xi0 = parse_vector(cfg.at("xi0"));
    if (xi0.size() != 2 * p) {
        throw ConfigError("xi0 must have length 2p = " + std::to_string(2 * p));
    }
    return PHState::unpack(xi0);
}

Json identity_activation_json() { return Json{{"kind", "identity"}, {"gamma", 1.0}}; }

Json integrator_json(Scalar record_every) {
    return Json{{"method", "rk45_adaptive"}, {"dt", 1e-3},         {"rtol", 1e-6},
                {"atol", 1e-8},              {"max_steps", 10000000},
                {"record_every", record_every}};
}

const Json kTask1Xi0 =
    Json::array({0.6, -2.3, -0.1, -1.1, -1.2, 0.3, -1.2, 0.3, 0.2, 1.6, -0.4, 1.6});

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "linear_single", "beta_sweep", "linear_sequential", "duffing_batch", "gd_compare"};
    return names;
}

Json default_config(const std::string& experiment) {
    Json linear_network{{"layer_widths", Json::array({2, 2})},
                        {"hidden_activation", identity_activation_json()},
                        {"output_activation", identity_activation_json()}};

    if (experiment == "linear_single") {
        return Json{
            {"experiment", "linear_single"},
            {"seed", 1},
            {"out", "out/linear_single"},
            {"network", linear_network},
            {"ph",
             {{"alpha", 1.0},
              {"beta", 0.0},
              {"damping", 1.0},
              {"inertia", 1.0},
              {"injection_gain", 0.0}}},
            {"integrator", integrator_json(0.01)},
            {"t_final", 5.0},
            {"sample", {{"input", Json::array({0.6, 0.6})}, {"label", Json::array({1.0, 0.0})}}},
            {"xi0", kTask1Xi0},
        };
    }
    if (experiment == "beta_sweep") {
        // Sweep points run to a convergence horizon so the emitted values are
        // the settled ones; only the endpoints of each run are recorded.
        return Json{
            {"experiment", "beta_sweep"},
            {"seed", 1},
            {"out", "out/beta_sweep"},
            {"network", linear_network},
            {"ph",
             {{"alpha", 1.0},
              {"beta", 0.0},
              {"damping", 1.0},
              {"inertia", 1.0},
              {"injection_gain", 0.0}}},
            {"integrator", integrator_json(40.0)},
            {"t_final", 40.0},
            {"sample", {{"input", Json::array({0.6, 0.6})}, {"label", Json::array({1.0, 0.0})}}},
            {"xi0", kTask1Xi0},
            {"sweep", {{"beta_min", 0.0}, {"beta_max", 3.0}, {"points", 100}}},
        };
    }
    if (experiment == "linear_sequential") {
        return Json{
            {"experiment", "linear_sequential"},
            {"seed", 1},
            {"out", "out/linear_sequential"},
            {"network", linear_network},
            {"ph",
             {{"alpha", 1.0},
              {"beta", 0.001},
              {"damping", 100.0},
              {"inertia", 1.0},
              {"injection_gain", 0.0}}},
            {"integrator", integrator_json(0.1)},
            {"trainer", {{"t_star", 0.1}, {"epochs", 100}}},
            {"data",
             {{"n_per_class", 1000},
              {"mean1", Json::array({1.0, 1.0})},
              {"mean2", Json::array({-1.0, -1.0})},
              {"sigma", 0.4},
              {"train_ratio", 0.75}}},
            {"xi0", kTask1Xi0},
            {"grid",
             {{"x1_min", -3.0},
              {"x1_max", 3.0},
              {"x2_min", -3.0},
              {"x2_max", 3.0},
              {"n1", 50},
              {"n2", 50}}},
            {"trajectory_stride", 1500},
        };
    }
    if (experiment == "duffing_batch") {
        return Json{
            {"experiment", "duffing_batch"},
            {"seed", 7},
            {"out", "out/duffing_batch"},
            {"network",
             {{"layer_widths", Json::array({2, 16, 16, 2})},
              {"hidden_activation", {{"kind", "softplus"}, {"gamma", 10.0}}},
              {"output_activation", identity_activation_json()}}},
            {"ph",
             {{"alpha", 1.0},
              {"beta", 0.0},
              {"damping", 0.5},
              {"inertia", 1.0},
              {"injection_gain", 0.0}}},
            {"integrator", integrator_json(0.1)},
            {"t_total", 100.0},
            {"data",
             {{"x_start", 0.0},
              {"x_end", 8.0},
              {"n_samples", 400},
              {"u0", Json::array({1.5, 1.0})}}},
            {"domain",
             {{"x1_min", -1.0},
              {"x1_max", 1.5},
              {"x2_min", -1.9},
              {"x2_max", 1.0},
              {"n1", 50},
              {"n2", 50}}},
            {"velocity_probe", {{"time", 30.0}, {"threshold", 0.01}}},
            {"trajectory_stride", 1},
        };
    }
    if (experiment == "gd_compare") {
        return Json{
            {"experiment", "gd_compare"},
            {"seed", 1},
            {"out", "out/gd_compare"},
            {"landscape",
             {{"kind", "quadratic"},
              {"center", Json::array({0.0, -0.3})},
              {"curvature", Json::array({1.0, 3.0})},
              {"tilt", 0.3}}},
            {"theta0", Json::array({1.9, 1.0})},
            {"gd", {{"step_size", 0.05}, {"steps", 400}}},
            {"ph", {{"damping", 1.0}, {"inertia", 1.0}, {"injection_gain", 0.0}}},
            {"integrator", integrator_json(0.05)},
            {"t_final", 30.0},
        };
    }
    throw ConfigError("unknown experiment: " + experiment);
}

namespace {

void merge_strict(Json& base, const Json& overrides, const std::string& path) {
    for (const auto& [key, value] : overrides.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) {
            throw ConfigError("unknown config key: " + where);
        }
        Json& slot = base[key];
        if (slot.is_object() && value.is_object()) {
            merge_strict(slot, value, where);
        } else if (slot.is_object() != value.is_object()) {
            throw ConfigError("config key has wrong shape: " + where);
        } else {
            slot = value;
        }
    }
}

Json parse_set_value(const std::string& text) {
    const Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded()) return Json(text);  // fall back to a plain string
    return parsed;
}

void apply_set(Json& cfg, const std::string& key_path, const std::string& value) {
    Json* node = &cfg;
    std::size_t begin = 0;
    std::string last;
    std::vector<std::string> parts;
    while (begin <= key_path.size()) {
        const std::size_t dot = key_path.find('.', begin);
        parts.push_back(key_path.substr(begin, dot == std::string::npos ? dot : dot - begin));
        if (dot == std::string::npos) break;
        begin = dot + 1;
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) {
            throw ConfigError("unknown config key: " + key_path);
        }
        node = &(*node)[parts[i]];
    }
    last = parts.back();
    if (!node->contains(last)) throw ConfigError("unknown config key: " + key_path);
    (*node)[last] = parse_set_value(value);
}

}  // namespace

Json resolve_config(const std::string& experiment, const std::optional<Json>& file_config,
                    const std::optional<std::uint64_t>& seed_override,
                    const std::vector<std::pair<std::string, std::string>>& set_overrides) {
    Json cfg = default_config(experiment);
    if (file_config) {
        if (file_config->contains("experiment") &&
            file_config->at("experiment").get<std::string>() != experiment) {
            throw ConfigError("config file is for experiment '" +
                              file_config->at("experiment").get<std::string>() +
                              "', not '" + experiment + "'");
        }
        merge_strict(cfg, *file_config, "");
    }
    if (seed_override) cfg["seed"] = *seed_override;
    for (const auto& [key, value] : set_overrides) apply_set(cfg, key, value);
    return cfg;
}

LinearSingleOutcome run_linear_single(const Json& cfg) {
    const NetworkSpec spec = parse_network(cfg.at("network"));
    const PHConfig ph = parse_ph(cfg.at("ph"));
    const IntegratorConfig icfg = parse_integrator(cfg.at("integrator"));
    const Scalar t_final = cfg.at("t_final").get<Scalar>();

    const std::vector<Sample> samples = {
        Sample{parse_vector(cfg.at("sample").at("input")),
               parse_vector(cfg.at("sample").at("label"))}};
    const PHState state0 = parse_initial_state(cfg, spec.parameter_count());

    LinearSingleOutcome outcome;
    outcome.trajectory = integrate_ph(spec, ph, state0, 0.0, t_final, icfg, Batch(samples));
    const PHState& final_state = outcome.trajectory.states.back();
    outcome.y_final = forward(spec, final_state.theta, samples[0].input);
    outcome.e_r = relative_error(samples[0].label, outcome.y_final);
    outcome.theta_norm = final_state.theta.norm();
    return outcome;
}

unsigned sweep_thread_count(Index points) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("PHFLOW_THREADS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && parsed >= 1) n = static_cast<unsigned>(parsed);
    }
    return std::min<unsigned>(n, static_cast<unsigned>(std::max<Index>(points, 1)));
}

BetaSweepOutcome run_beta_sweep(const Json& cfg) {
    const NetworkSpec spec = parse_network(cfg.at("network"));
    const PHConfig ph_base = parse_ph(cfg.at("ph"));
    const IntegratorConfig icfg = parse_integrator(cfg.at("integrator"));
    const Scalar t_final = cfg.at("t_final").get<Scalar>();

    const std::vector<Sample> samples = {
        Sample{parse_vector(cfg.at("sample").at("input")),
               parse_vector(cfg.at("sample").at("label"))}};
    const PHState state0 = parse_initial_state(cfg, spec.parameter_count());

    const Json& sweep = cfg.at("sweep");
    const Index points = sweep.at("points").get<Index>();
    if (points < 1) throw ConfigError("sweep.points must be >= 1");
    const Scalar beta_min = sweep.at("beta_min").get<Scalar>();
    const Scalar beta_max = sweep.at("beta_max").get<Scalar>();

    BetaSweepOutcome outcome;
    outcome.betas.resize(static_cast<std::size_t>(points));
    outcome.e_r.resize(static_cast<std::size_t>(points));
    outcome.theta_norm.resize(static_cast<std::size_t>(points));
    for (Index i = 0; i < points; ++i) {
        outcome.betas[static_cast<std::size_t>(i)] =
            points == 1 ? beta_min
                        : beta_min + (beta_max - beta_min) * static_cast<Scalar>(i) /
                              static_cast<Scalar>(points - 1);
    }

    // Points are independent; results land in beta order no matter which
    // worker finishes first.
    std::atomic<Index> next{0};
    auto worker = [&]() {
        for (Index i = next.fetch_add(1); i < points; i = next.fetch_add(1)) {
            PHConfig ph = ph_base;
            ph.beta = outcome.betas[static_cast<std::size_t>(i)];
            const TrajectoryRecord traj =
                integrate_ph(spec, ph, state0, 0.0, t_final, icfg, Batch(samples));
            const PHState& final_state = traj.states.back();
            const Vector y = forward(spec, final_state.theta, samples[0].input);
            outcome.e_r[static_cast<std::size_t>(i)] = relative_error(samples[0].label, y);
            outcome.theta_norm[static_cast<std::size_t>(i)] = final_state.theta.norm();
        }
    };

    const unsigned n_threads = sweep_thread_count(points);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return outcome;
}

LinearSequentialOutcome run_linear_sequential(const Json& cfg) {
    const NetworkSpec spec = parse_network(cfg.at("network"));
    const PHConfig ph = parse_ph(cfg.at("ph"));
    const IntegratorConfig icfg = parse_integrator(cfg.at("integrator"));

    const Json& data = cfg.at("data");
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    Dataset dataset = gaussian_blobs(seed, data.at("n_per_class").get<Index>(),
                                     parse_vector(data.at("mean1")),
                                     parse_vector(data.at("mean2")),
                                     data.at("sigma").get<Scalar>());
    dataset = split_dataset(dataset, data.at("train_ratio").get<Scalar>(), seed + 1);

    SequentialConfig seq;
    seq.t_star = cfg.at("trainer").at("t_star").get<Scalar>();
    seq.epochs = cfg.at("trainer").at("epochs").get<Index>();

    const PHState state0 = parse_initial_state(cfg, spec.parameter_count());

    LinearSequentialOutcome outcome;
    outcome.dataset = dataset;
    outcome.training =
        train_sequential(spec, ph, seq, icfg, dataset.train_subset(), state0);

    const Dataset test = dataset.test_subset();
    outcome.test_accuracy = accuracy(spec, outcome.training.final_state.theta, test.all());
    outcome.grid = decision_grid(spec, outcome.training.final_state.theta,
                                 parse_rectangle(cfg.at("grid")),
                                 parse_resolution(cfg.at("grid")));
    return outcome;
}

DuffingOutcome run_duffing_batch(const Json& cfg) {
    const NetworkSpec spec = parse_network(cfg.at("network"));
    const PHConfig ph = parse_ph(cfg.at("ph"));
    const IntegratorConfig icfg = parse_integrator(cfg.at("integrator"));

    DuffingSpec dspec;
    const Json& data = cfg.at("data");
    dspec.x_start = data.at("x_start").get<Scalar>();
    dspec.x_end = data.at("x_end").get<Scalar>();
    dspec.n_samples = data.at("n_samples").get<Index>();
    dspec.u0 = parse_vector(data.at("u0"));

    DuffingOutcome outcome;
    outcome.dataset = duffing_dataset(dspec, icfg);
    outcome.parameter_count = spec.parameter_count();

    // theta ~ N(0,1) then thetadot ~ U[0,1), both from the experiment seed.
    SplitMix64 rng(cfg.at("seed").get<std::uint64_t>());
    const Index p = spec.parameter_count();
    PHState state0 = PHState::zero(p);
    for (Index i = 0; i < p; ++i) state0.theta[i] = rng.next_normal();
    Vector thetadot0(p);
    for (Index i = 0; i < p; ++i) thetadot0[i] = rng.next_double();
    state0.omega = ph.inertia.apply(thetadot0);

    const Scalar t_total = cfg.at("t_total").get<Scalar>();
    outcome.training = train_batch(spec, ph, icfg, outcome.dataset, state0, t_total);
    outcome.initial_loss = outcome.training.trajectory.hamiltonians.front();
    outcome.final_loss = outcome.training.trajectory.hamiltonians.back();

    const TrueField field = [](const Vector& u) { return duffing_field(u); };
    outcome.field = error_field(spec, outcome.training.final_state.theta,
                                parse_rectangle(cfg.at("domain")),
                                parse_resolution(cfg.at("domain")), field);
    outcome.mean_error_train_inputs = mean_field_error(
        spec, outcome.training.final_state.theta, outcome.dataset.all(), field);

    const Json& probe = cfg.at("velocity_probe");
    const Scalar probe_time = probe.at("time").get<Scalar>();
    const Scalar threshold = probe.at("threshold").get<Scalar>();
    const TrajectoryRecord& traj = outcome.training.trajectory;
    std::size_t probe_idx = traj.size() - 1;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] >= probe_time - 1e-9) {
            probe_idx = i;
            break;
        }
    }
    const Vector thetadot = ph.inertia.solve(traj.states[probe_idx].omega);
    Index converged = 0;
    for (Index i = 0; i < p; ++i) {
        if (std::abs(thetadot[i]) < threshold) ++converged;
    }
    outcome.velocity_convergence_fraction =
        static_cast<Scalar>(converged) / static_cast<Scalar>(p);
    return outcome;
}

GdCompareOutcome run_gd_compare(const Json& cfg) {
    GdCompareOutcome outcome;
    outcome.landscape = parse_landscape(cfg.at("landscape"));
    const Landscape& land = outcome.landscape;

    Vector theta = parse_vector(cfg.at("theta0"));
    const Scalar step = cfg.at("gd").at("step_size").get<Scalar>();
    const Index steps = cfg.at("gd").at("steps").get<Index>();
    outcome.gd_iterates.push_back(theta);
    outcome.gd_values.push_back(land.value(theta));
    for (Index i = 0; i < steps; ++i) {
        theta -= step * land.gradient(theta);
        if (!theta.allFinite()) {
            throw DivergenceError("gd_compare: gradient descent diverged",
                                  static_cast<Scalar>(i));
        }
        outcome.gd_iterates.push_back(theta);
        outcome.gd_values.push_back(land.value(theta));
    }

    const PHConfig ph = parse_ph(cfg.at("ph"));
    const IntegratorConfig icfg = parse_integrator(cfg.at("integrator"));
    const Scalar t_final = cfg.at("t_final").get<Scalar>();
    const Vector theta0 = parse_vector(cfg.at("theta0"));

    const FieldFn field = [&](Scalar, const Vector& xi) {
        const PHState s = PHState::unpack(xi);
        const Vector thetadot = ph.inertia.solve(s.omega);
        Vector dxi(4);
        dxi.head(2) = thetadot;
        dxi.tail(2) = -land.gradient(s.theta) - ph.damping.apply(thetadot) -
                      ph.injection_gain * thetadot;
        return dxi;
    };
    Vector xi0 = Vector::Zero(4);
    xi0.head(2) = theta0;
    if (t_final > 0.0) {
        outcome.ph_trajectory = integrate(field, xi0, 0.0, t_final, icfg);
    } else {
        outcome.ph_trajectory.times.push_back(0.0);
        outcome.ph_trajectory.states.push_back(xi0);
    }
    for (const Vector& xi : outcome.ph_trajectory.states) {
        outcome.ph_values.push_back(land.value(xi.head(2)));
    }
    return outcome;
}

namespace {

namespace fs = std::filesystem;

void write_manifest(const Json& cfg, const fs::path& dir) {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << cfg.dump(2) << '\n';
}

void write_summary(const Json& summary, const fs::path& dir) {
    std::ofstream out(dir / "summary.json");
    if (!out) throw IoError("cannot write summary in " + dir.string());
    out << summary.dump(2) << '\n';
}

std::vector<std::string> state_columns(Index p) {
    std::vector<std::string> cols;
    for (Index i = 0; i < p; ++i) cols.push_back("theta_" + std::to_string(i + 1));
    for (Index i = 0; i < p; ++i) cols.push_back("omega_" + std::to_string(i + 1));
    return cols;
}

void append_state(std::vector<Scalar>& row, const PHState& s) {
    row.insert(row.end(), s.theta.data(), s.theta.data() + s.theta.size());
    row.insert(row.end(), s.omega.data(), s.omega.data() + s.omega.size());
}

void write_linear_single_artifacts(const Json& cfg, const LinearSingleOutcome& outcome,
                                   const fs::path& dir) {
    const NetworkSpec spec = parse_network(cfg.at("network"));
    const Vector input = parse_vector(cfg.at("sample").at("input"));
    const Index p = spec.parameter_count();

    CsvWriter csv((dir / "trajectory.csv").string());
    std::vector<std::string> header = {"t"};
    for (const std::string& c : state_columns(p)) header.push_back(c);
    for (Index i = 0; i < spec.output_dim(); ++i) header.push_back("y_" + std::to_string(i + 1));
    header.push_back("jstar");
    csv.header(header);

    const TrajectoryRecord& traj = outcome.trajectory;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::vector<Scalar> row = {traj.times[i]};
        append_state(row, traj.states[i]);
        const Vector y = forward(spec, traj.states[i].theta, input);
        row.insert(row.end(), y.data(), y.data() + y.size());
        row.push_back(traj.hamiltonians[i]);
        csv.row(row);
    }

    write_summary(Json{{"e_r", outcome.e_r},
                       {"theta_norm", outcome.theta_norm},
                       {"final_jstar", traj.hamiltonians.back()},
                       {"t_final", traj.times.back()}},
                  dir);
}

void write_beta_sweep_artifacts(const BetaSweepOutcome& outcome, const fs::path& dir) {
    CsvWriter csv((dir / "sweep.csv").string());
    csv.header({"beta", "e_r", "theta_norm"});
    for (std::size_t i = 0; i < outcome.betas.size(); ++i) {
        csv.row({outcome.betas[i], outcome.e_r[i], outcome.theta_norm[i]});
    }
    write_summary(Json{{"points", outcome.betas.size()},
                       {"e_r_at_beta_max", outcome.e_r.back()},
                       {"theta_norm_at_beta_max", outcome.theta_norm.back()}},
                  dir);
}

void write_trajectory_csv(const TrajectoryRecord& traj, Index stride, const fs::path& path) {
    if (traj.size() == 0) throw IoError("empty trajectory: " + path.string());
    const Index p = traj.states.front().dim();
    CsvWriter csv(path.string());
    std::vector<std::string> header = {"t"};
    for (const std::string& c : state_columns(p)) header.push_back(c);
    header.push_back("jstar");
    header.push_back("dissipation_rate");
    csv.header(header);

    const std::size_t n = traj.size();
    const std::size_t step = static_cast<std::size_t>(std::max<Index>(stride, 1));
    auto emit = [&](std::size_t i) {
        std::vector<Scalar> row = {traj.times[i]};
        append_state(row, traj.states[i]);
        row.push_back(traj.hamiltonians[i]);
        row.push_back(traj.dissipation_rates[i]);
        csv.row(row);
    };
    std::size_t last_written = 0;
    for (std::size_t i = 0; i < n; i += step) {
        emit(i);
        last_written = i;
    }
    if (last_written != n - 1) emit(n - 1);
}

void write_linear_sequential_artifacts(const Json& cfg, const LinearSequentialOutcome& outcome,
                                       const fs::path& dir) {
    CsvWriter loss((dir / "loss.csv").string());
    loss.header({"epoch", "jstar_batch"});
    for (std::size_t i = 0; i < outcome.training.epoch_losses.size(); ++i) {
        loss.row({static_cast<Scalar>(i + 1), outcome.training.epoch_losses[i]});
    }

    write_trajectory_csv(outcome.training.trajectory,
                         cfg.at("trajectory_stride").get<Index>(), dir / "trajectory.csv");
    write_decision_grid_csv(outcome.grid, (dir / "decision_grid.csv").string());

    write_summary(Json{{"test_accuracy", outcome.test_accuracy},
                       {"epochs", outcome.training.epoch_losses.size()},
                       {"final_epoch_loss", outcome.training.epoch_losses.back()},
                       {"jumps", outcome.training.jump_count},
                       {"total_time", outcome.training.total_time},
                       {"train_size", outcome.dataset.split->train.size()},
                       {"test_size", outcome.dataset.split->test.size()}},
                  dir);
}

void write_duffing_artifacts(const Json& cfg, const DuffingOutcome& outcome,
                             const fs::path& dir) {
    const TrajectoryRecord& traj = outcome.training.trajectory;
    write_trajectory_csv(traj, cfg.at("trajectory_stride").get<Index>(),
                         dir / "trajectory.csv");

    CsvWriter loss((dir / "loss.csv").string());
    loss.header({"t", "jstar_batch"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        loss.row({traj.times[i], traj.hamiltonians[i]});
    }

    write_error_field_csv(outcome.field, (dir / "error_field.csv").string());

    // Saddle-transit diagnostic: where the dissipation-rate magnitude peaks
    // once the initial transient (t < 1) is over. Reported, not asserted.
    Scalar peak_rate = 0.0;
    Scalar peak_time = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < 1.0) continue;
        if (std::abs(traj.dissipation_rates[i]) > peak_rate) {
            peak_rate = std::abs(traj.dissipation_rates[i]);
            peak_time = traj.times[i];
        }
    }

    write_summary(Json{{"parameter_count", outcome.parameter_count},
                       {"dissipation_peak_time", peak_time},
                       {"dissipation_peak_magnitude", peak_rate},
                       {"initial_loss", outcome.initial_loss},
                       {"final_loss", outcome.final_loss},
                       {"loss_ratio", outcome.initial_loss / outcome.final_loss},
                       {"mean_error_grid", outcome.field.mean},
                       {"max_error_grid", outcome.field.max},
                       {"mean_error_train_inputs", outcome.mean_error_train_inputs},
                       {"velocity_convergence_fraction", outcome.velocity_convergence_fraction},
                       {"velocity_probe", cfg.at("velocity_probe")}},
                  dir);
}

void write_gd_compare_artifacts(const GdCompareOutcome& outcome, const fs::path& dir) {
    CsvWriter gd((dir / "gd_iterates.csv").string());
    gd.header({"step", "theta_1", "theta_2", "value"});
    for (std::size_t i = 0; i < outcome.gd_iterates.size(); ++i) {
        gd.row({static_cast<Scalar>(i), outcome.gd_iterates[i][0], outcome.gd_iterates[i][1],
                outcome.gd_values[i]});
    }

    CsvWriter traj((dir / "trajectory.csv").string());
    traj.header({"t", "theta_1", "theta_2", "omega_1", "omega_2", "value"});
    for (std::size_t i = 0; i < outcome.ph_trajectory.times.size(); ++i) {
        const Vector& xi = outcome.ph_trajectory.states[i];
        traj.row({outcome.ph_trajectory.times[i], xi[0], xi[1], xi[2], xi[3],
                  outcome.ph_values[i]});
    }

    write_summary(
        Json{{"gd_final", vector_to_json(outcome.gd_iterates.back())},
             {"gd_final_value", outcome.gd_values.back()},
             {"ph_final", vector_to_json(outcome.ph_trajectory.states.back().head(2).eval())},
             {"ph_final_value", outcome.ph_values.back()}},
        dir);
}

}  // namespace

void run_experiment_to_dir(const Json& cfg_in, const std::string& out_dir) {
    Json cfg = cfg_in;
    cfg["out"] = out_dir;
    const std::string experiment = cfg.at("experiment").get<std::string>();
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    write_manifest(cfg, dir);
    if (experiment == "linear_single") {
        write_linear_single_artifacts(cfg, run_linear_single(cfg), dir);
    } else if (experiment == "beta_sweep") {
        write_beta_sweep_artifacts(run_beta_sweep(cfg), dir);
    } else if (experiment == "linear_sequential") {
        write_linear_sequential_artifacts(cfg, run_linear_sequential(cfg), dir);
    } else if (experiment == "duffing_batch") {
        write_duffing_artifacts(cfg, run_duffing_batch(cfg), dir);
    } else if (experiment == "gd_compare") {
        write_gd_compare_artifacts(run_gd_compare(cfg), dir);
    } else {
        throw ConfigError("unknown experiment: " + experiment);
    }
}

}  // namespace phflow
