// Copyright 2026 The branchsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "branchsim/config.h"
#include "branchsim/harness.h"

namespace {

constexpr int EXIT_USAGE = 2;

}  // namespace

int main(int argc, char **argv) {
    using namespace branchsim;

    CLI::App app{"Exact state-vector simulator of observer branching, memory erasure and reversible measurement"};
    app.require_subcommand(1);
    app.fallthrough();

    // All settings are collected as strings so flags and config files go
    // through the same validation; flags override the config file.
    Settings flags;
    std::string config_path;
    const std::pair<const char *, const char *> settings[] = {
        {"p", "Disaster-learning probability per cycle (comma list for sweep)"},
        {"q", "Fraction of non-disaster macrostates that reset pseudo-randomly (comma list for sweep)"},
        {"trials", "Monte Carlo trials"},
        {"seed", "Master seed (64-bit unsigned)"},
        {"interpretation", "mwi, collapse or both"},
        {"scenario", "uncorrelated or correlated"},
        {"mode", "reversible or dump (deutsch only)"},
        {"out", "Output CSV path; the summary goes to <out>.summary.csv"},
        {"macrostates", "Number of cycle macrostates M (0 = smallest exact for q)"},
        {"threads", "Worker threads for trials (0 = all cores)"},
    };
    for (const auto &[name, help] : settings) {
        app.add_option_function<std::string>(
            std::string("--") + name,
            [&flags, key = std::string(name)](const std::string &value) {
                flags[key] = value;
            },
            help);
    }
    app.add_option("--config", config_path, "Flat key=value config file");

    CLI::App *deutsch = app.add_subcommand("deutsch", "Reversible measurement discriminator");
    CLI::App *disaster = app.add_subcommand("disaster", "Single disaster cycle with memory reset");
    CLI::App *sweep = app.add_subcommand("sweep", "Grid over p and q");
    CLI::App *verify = app.add_subcommand("verify", "Run the invariant grid and print per-check results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return EXIT_USAGE;
    }

    Experiment experiment = Experiment::VERIFY;
    if (deutsch->parsed()) {
        experiment = Experiment::DEUTSCH;
    } else if (disaster->parsed()) {
        experiment = Experiment::DISASTER;
    } else if (sweep->parsed()) {
        experiment = Experiment::SWEEP;
    } else if (!verify->parsed()) {
        std::cerr << "no subcommand given\n";
        return EXIT_USAGE;
    }

    ExperimentConfig cfg;
    try {
        Settings merged;
        if (!config_path.empty()) {
            merged = load_settings_file(config_path);
        }
        for (const auto &[key, value] : flags) {
            merged[key] = value;
        }
        cfg = make_config(experiment, merged);
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    }

    try {
        return run_experiment(cfg, std::cout);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    }
}
