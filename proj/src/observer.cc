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

#include "branchsim/observer.h"

#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace branchsim {

MacrostateRegister::MacrostateRegister(std::vector<Macrostate> states) : states_(std::move(states)) {
    if (states_.size() < 2) {
        throw std::invalid_argument("a macrostate register needs at least 2 macrostates");
    }
    std::set<std::string> seen;
    for (const auto &s : states_) {
        if (!seen.insert(s.label).second) {
            throw std::invalid_argument(fmt::format("duplicate macrostate label '{}'", s.label));
        }
        if (s.restored && (s.knows_disaster || s.reset_scheduled)) {
            throw std::invalid_argument(fmt::format("restored macrostate '{}' cannot carry cycle flags", s.label));
        }
        if (s.knows_disaster && s.reset_scheduled) {
            throw std::invalid_argument(
                fmt::format("macrostate '{}' cannot be both disaster-aware and pseudo-random reset", s.label));
        }
    }
}

MacrostateRegister MacrostateRegister::partitioned(size_t n_disaster, size_t n_non_disaster, double q,
                                                   const std::vector<std::string> &restored_labels) {
    if (!(q >= 0 && q <= 1)) {
        throw std::invalid_argument(fmt::format("q = {} outside [0, 1]", q));
    }
    if (n_non_disaster == 0) {
        throw std::invalid_argument("need at least one non-disaster macrostate");
    }
    auto n_reset = static_cast<size_t>(std::llround(q * static_cast<double>(n_non_disaster)));
    std::vector<Macrostate> states;
    for (size_t k = 0; k < n_disaster; k++) {
        states.push_back({fmt::format("disaster_{}", k), true, false, false});
    }
    for (size_t k = 0; k < n_reset; k++) {
        states.push_back({fmt::format("reset_{}", k), false, true, false});
    }
    for (size_t k = 0; k < n_non_disaster - n_reset; k++) {
        states.push_back({fmt::format("steady_{}", k), false, false, false});
    }
    for (const auto &label : restored_labels) {
        states.push_back({label, false, false, true});
    }
    return MacrostateRegister(std::move(states));
}

std::vector<std::string> MacrostateRegister::labels() const {
    std::vector<std::string> out;
    for (const auto &s : states_) {
        out.push_back(s.label);
    }
    return out;
}

size_t MacrostateRegister::index_of(const std::string &label) const {
    for (size_t k = 0; k < states_.size(); k++) {
        if (states_[k].label == label) {
            return k;
        }
    }
    throw std::invalid_argument(fmt::format("unknown macrostate '{}'", label));
}

double MacrostateRegister::realized_q() const {
    size_t non_disaster = 0;
    size_t scheduled = 0;
    for (const auto &s : states_) {
        if (s.restored || s.knows_disaster) {
            continue;
        }
        non_disaster++;
        scheduled += s.reset_scheduled;
    }
    if (non_disaster == 0) {
        throw std::domain_error("register has no non-disaster cycle macrostates");
    }
    return static_cast<double>(scheduled) / static_cast<double>(non_disaster);
}

const Branch *BranchDecomposition::find(size_t macrostate_index) const {
    for (const auto &b : branches) {
        if (b.macrostate_index == macrostate_index) {
            return &b;
        }
    }
    return nullptr;
}

double BranchDecomposition::weight_of(size_t macrostate_index) const {
    const Branch *b = find(macrostate_index);
    return b == nullptr ? 0.0 : b->weight;
}

BranchDecomposition decompose(const StateVector &psi) {
    const SpaceLayout &layout = psi.layout();
    if (!layout.has_observer()) {
        throw std::invalid_argument("cannot decompose: layout has no observer register");
    }
    BranchDecomposition result;
    result.layout = layout;
    SpaceLayout env_layout = layout.without(0);
    size_t env_dim = env_layout.total_dim();
    size_t observer_dim = layout.registers()[0].dim;
    auto amps = psi.amps();
    for (size_t k = 0; k < observer_dim; k++) {
        std::vector<Amplitude> slice(amps.begin() + static_cast<std::ptrdiff_t>(k * env_dim),
                                     amps.begin() + static_cast<std::ptrdiff_t>((k + 1) * env_dim));
        StateVector env(env_layout, std::move(slice));
        double w = env.squared_norm();
        if (w < BRANCH_PRUNE_THRESHOLD) {
            continue;
        }
        result.total_weight += w;
        result.branches.push_back({k, std::move(env), w});
    }
    return result;
}

StateVector reconstruct(const BranchDecomposition &d) {
    size_t total = d.layout.total_dim();
    size_t env_dim = total / d.layout.registers()[0].dim;
    std::vector<Amplitude> amps(total);
    for (const auto &b : d.branches) {
        auto env = b.environment_state.amps();
        std::copy(env.begin(), env.end(), amps.begin() + static_cast<std::ptrdiff_t>(b.macrostate_index * env_dim));
    }
    return StateVector(d.layout, std::move(amps));
}

std::vector<std::pair<size_t, double>> born_weights(const BranchDecomposition &d) {
    if (d.total_weight <= 0) {
        throw std::domain_error("born weights of a zero-weight decomposition");
    }
    std::vector<std::pair<size_t, double>> out;
    for (const auto &b : d.branches) {
        out.emplace_back(b.macrostate_index, b.weight / d.total_weight);
    }
    return out;
}

size_t sample_macrostate(const BranchDecomposition &d, RandomStream &rng) {
    if (d.total_weight <= 0) {
        throw std::domain_error("cannot sample a zero-weight decomposition");
    }
    std::vector<double> weights;
    for (const auto &b : d.branches) {
        weights.push_back(b.weight);
    }
    return d.branches[sample_index(weights, rng)].macrostate_index;
}

StateVector collapse_to(const StateVector &psi, size_t macrostate_index) {
    if (!psi.layout().has_observer()) {
        throw std::invalid_argument("cannot collapse: layout has no observer register");
    }
    StateVector projected = project(psi, 0, macrostate_index);
    if (projected.squared_norm() < BRANCH_PRUNE_THRESHOLD) {
        throw std::domain_error(fmt::format("cannot collapse onto zero-weight macrostate {}", macrostate_index));
    }
    return normalize(projected);
}

std::vector<double> marginal(const StateVector &psi, size_t position) {
    const SpaceLayout &layout = psi.layout();
    if (position >= layout.num_registers()) {
        throw std::out_of_range(fmt::format("register position {} out of range", position));
    }
    std::vector<double> out(layout.registers()[position].dim);
    for (size_t i = 0; i < psi.size(); i++) {
        out[layout.digit(i, position)] += std::norm(psi[i]);
    }
    return out;
}

StateVector project(const StateVector &psi, size_t position, size_t value) {
    const SpaceLayout &layout = psi.layout();
    if (position >= layout.num_registers()) {
        throw std::out_of_range(fmt::format("register position {} out of range", position));
    }
    if (value >= layout.registers()[position].dim) {
        throw std::out_of_range(
            fmt::format("value {} out of range for register '{}'", value, layout.registers()[position].name));
    }
    std::vector<Amplitude> amps(psi.size());
    for (size_t i = 0; i < psi.size(); i++) {
        if (layout.digit(i, position) == value) {
            amps[i] = psi[i];
        }
    }
    return StateVector(layout, std::move(amps));
}

}  // namespace branchsim
