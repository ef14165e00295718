// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phflow/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct SubcommandArgs {
    std::string experiment;
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;  // negative means "not given"
    std::vector<std::string> sets;
    CLI::App* command = nullptr;
};

int run(const SubcommandArgs& args) {
    using phflow::Json;

    std::optional<Json> file_config;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) {
            std::cerr << "error: cannot open config file: " << args.config_path << "\n";
            return kExitIo;
        }
        try {
            file_config = Json::parse(in);
        } catch (const Json::exception& e) {
            std::cerr << "error: invalid config JSON: " << e.what() << "\n";
            return kExitConfig;
        }
    }

    std::vector<std::pair<std::string, std::string>> set_pairs;
    for (const std::string& kv : args.sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects key=value, got: " << kv << "\n";
            return kExitConfig;
        }
        set_pairs.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }

    std::optional<std::uint64_t> seed;
    if (args.seed >= 0) seed = static_cast<std::uint64_t>(args.seed);

    Json cfg;
    try {
        cfg = phflow::resolve_config(args.experiment, file_config, seed, set_pairs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::string out_dir =
        args.out_dir.empty() ? cfg.at("out").get<std::string>() : args.out_dir;
    cfg["out"] = out_dir;

    try {
        phflow::run_experiment_to_dir(cfg, out_dir);
    } catch (const phflow::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const phflow::NonFiniteError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const phflow::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const phflow::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const phflow::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::cout << "wrote artifacts to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phflow - train feed-forward networks by integrating a port-Hamiltonian flow"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"linear-single", "linear_single"},
        {"beta-sweep", "beta_sweep"},
        {"linear-seq", "linear_sequential"},
        {"duffing", "duffing_batch"},
        {"gd-compare", "gd_compare"},
    };

    std::vector<std::unique_ptr<SubcommandArgs>> commands;
    for (const auto& [name, experiment] : subs) {
        auto args = std::make_unique<SubcommandArgs>();
        args->experiment = experiment;
        args->command = app.add_subcommand(name, "run the " + name + " experiment");
        args->command->add_option("--config", args->config_path, "JSON config file");
        args->command->add_option("--out", args->out_dir, "output directory");
        args->command->add_option("--seed", args->seed, "seed override");
        args->command->add_option("--set", args->sets,
                                  "override a config key, e.g. --set ph.beta=0.5");
        commands.push_back(std::move(args));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    for (const auto& args : commands) {
        if (args->command->parsed()) return run(*args);
    }
    return kExitConfig;
}
