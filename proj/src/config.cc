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

#include "branchsim/config.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace branchsim {

namespace {

std::string_view trim(std::string_view s) {
    const char *ws = " \t\r\n";
    size_t b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_probability(std::string_view key, std::string_view text) {
    std::string s(trim(text));
    size_t used = 0;
    double value;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception &) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, s));
    }
    if (used != s.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, s));
    }
    if (!(value >= 0 && value <= 1)) {
        throw ConfigError(fmt::format("{}: {} is outside [0, 1]", key, s));
    }
    return value;
}

std::vector<double> parse_probability_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    size_t start = 0;
    while (true) {
        size_t comma = text.find(',', start);
        out.push_back(parse_probability(key, text.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    text = trim(text);
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
    }
    return value;
}

template <class F>
auto parse_enum(std::string_view key, std::string_view text, F parse) {
    try {
        return parse(trim(text));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
}

}  // namespace

std::string_view experiment_name(Experiment experiment) {
    switch (experiment) {
        case Experiment::DEUTSCH:
            return "deutsch";
        case Experiment::DISASTER:
            return "disaster";
        case Experiment::SWEEP:
            return "sweep";
        case Experiment::VERIFY:
            return "verify";
    }
    throw std::invalid_argument("unknown experiment");
}

Experiment parse_experiment(std::string_view text) {
    for (auto e : {Experiment::DEUTSCH, Experiment::DISASTER, Experiment::SWEEP, Experiment::VERIFY}) {
        if (experiment_name(e) == text) {
            return e;
        }
    }
    throw std::invalid_argument(fmt::format("unknown experiment '{}'", text));
}

std::vector<Interpretation> expand(InterpretationChoice choice) {
    switch (choice) {
        case InterpretationChoice::MWI:
            return {Interpretation::MANY_WORLDS};
        case InterpretationChoice::COLLAPSE:
            return {Interpretation::COLLAPSE};
        case InterpretationChoice::BOTH:
            return {Interpretation::MANY_WORLDS, Interpretation::COLLAPSE};
    }
    return {};
}

Settings parse_settings(std::string_view text) {
    Settings settings;
    size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        line_no++;
        std::string_view view = trim(line);
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") {
            view = trim(view.substr(3));
        }
        if (view.empty() || view.front() == '#') {
            continue;
        }
        size_t eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}: expected key=value", line_no));
        }
        std::string_view key = trim(view.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(fmt::format("line {}: empty key", line_no));
        }
        settings[std::string(key)] = std::string(trim(view.substr(eq + 1)));
    }
    return settings;
}

Settings load_settings_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(fmt::format("cannot read config file '{}'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_settings(buffer.str());
}

ExperimentConfig make_config(Experiment experiment, const Settings &settings) {
    static const std::set<std::string, std::less<>> known{"interpretation", "p",    "q",   "scenario",    "mode",
                                                          "trials",         "seed", "out", "macrostates", "threads"};
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (experiment == Experiment::SWEEP || experiment == Experiment::VERIFY) {
        cfg.p = {0, 0.001, 0.01, 0.1, 0.2, 0.5, 0.9, 1};
        cfg.q = {0, 0.1, 0.2, 0.25, 0.5, 1};
    }
    for (const auto &[key, value] : settings) {
        if (!known.contains(key)) {
            throw ConfigError(fmt::format("unknown setting '{}'", key));
        }
        if (key == "interpretation") {
            if (value == "mwi") {
                cfg.interpretation = InterpretationChoice::MWI;
            } else if (value == "collapse") {
                cfg.interpretation = InterpretationChoice::COLLAPSE;
            } else if (value == "both") {
                cfg.interpretation = InterpretationChoice::BOTH;
            } else {
                throw ConfigError(fmt::format("interpretation: '{}' is not one of mwi, collapse, both", value));
            }
        } else if (key == "p") {
            cfg.p = parse_probability_list(key, value);
        } else if (key == "q") {
            cfg.q = parse_probability_list(key, value);
        } else if (key == "scenario") {
            cfg.scenario = parse_enum(key, value, parse_scenario);
        } else if (key == "mode") {
            cfg.mode = parse_enum(key, value, parse_deutsch_mode);
        } else if (key == "trials") {
            cfg.trials = parse_unsigned(key, value);
            if (cfg.trials == 0) {
                throw ConfigError("trials: must be at least 1");
            }
        } else if (key == "seed") {
            cfg.seed = parse_unsigned(key, value);
        } else if (key == "out") {
            if (value.empty()) {
                throw ConfigError("out: empty path");
            }
            cfg.out = value;
        } else if (key == "macrostates") {
            cfg.macrostates = parse_unsigned(key, value);
            if (cfg.macrostates == 1 || cfg.macrostates > MAX_MACROSTATES) {
                throw ConfigError(fmt::format("macrostates: must be 0 (automatic) or in [2, {}]", MAX_MACROSTATES));
            }
        } else if (key == "threads") {
            cfg.threads = parse_unsigned(key, value);
        }
    }
    if (experiment != Experiment::SWEEP && experiment != Experiment::VERIFY &&
        (cfg.p.size() != 1 || cfg.q.size() != 1)) {
        throw ConfigError(fmt::format("{} takes a single p and q", experiment_name(experiment)));
    }
    return cfg;
}

}  // namespace branchsim
