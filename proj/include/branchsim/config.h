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

#ifndef BRANCHSIM_CONFIG_H
#define BRANCHSIM_CONFIG_H

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "branchsim/interpretations.h"
#include "branchsim/protocols.h"

namespace branchsim {

enum class Experiment {
    DEUTSCH,
    DISASTER,
    SWEEP,
    VERIFY,
};

std::string_view experiment_name(Experiment experiment);
Experiment parse_experiment(std::string_view text);

enum class InterpretationChoice {
    MWI,
    COLLAPSE,
    BOTH,
};

std::vector<Interpretation> expand(InterpretationChoice choice);

struct ExperimentConfig {
    Experiment experiment = Experiment::DISASTER;
    InterpretationChoice interpretation = InterpretationChoice::MWI;
    /// The first entries drive single-point experiments; sweep uses all.
    std::vector<double> p{0.01};
    std::vector<double> q{0.1};
    Scenario scenario = Scenario::UNCORRELATED;
    DeutschMode mode = DeutschMode::REVERSIBLE;
    uint64_t trials = 10000;
    uint64_t seed = 0;
    std::optional<std::string> out;
    /// 0 picks the minimal count that realizes q.
    size_t macrostates = 0;
    /// 0 uses the hardware concurrency.
    size_t threads = 0;
};

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Flat key=value settings. Later entries win.
using Settings = std::map<std::string, std::string, std::less<>>;

/// Parses UTF-8 `key = value` lines. Blank lines and lines starting with '#'
/// are ignored; surrounding whitespace is trimmed.
Settings parse_settings(std::string_view text);
Settings load_settings_file(const std::string &path);

/// Recognized keys: interpretation, p, q, scenario, mode, trials, seed, out,
/// macrostates, threads. p and q accept comma-separated lists.
ExperimentConfig make_config(Experiment experiment, const Settings &settings);

}  // namespace branchsim

#endif
