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

#include "branchsim/interpretations.h"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "branchsim/observer.h"

namespace branchsim {

namespace {

constexpr size_t MAX_TREE_NODES = size_t{1} << 16;

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

struct WorldState {
    StateVector global;
    StateVector followed;
    bool tracks_global;
};

struct ReadoutEval {
    size_t position;
    std::vector<double> distribution;
    bool sampled;
};

class Runner {
   public:
    Runner(const Schedule &schedule, Interpretation interpretation, ExecutionOptions options)
        : schedule_(schedule), interpretation_(interpretation), options_(options) {
    }

    WorldState start(const StateVector &initial) const {
        if (!(initial.layout() == schedule_.layout())) {
            throw std::invalid_argument("initial state layout does not match the schedule layout");
        }
        StateVector psi = normalize(initial);
        return {psi, psi, true};
    }

    /// Applies operator steps from `from` until the next readout; returns its
    /// step index, or steps().size() at the end.
    size_t advance(WorldState &w, size_t from) const {
        const auto &steps = schedule_.steps();
        size_t i = from;
        for (; i < steps.size(); i++) {
            if (std::holds_alternative<ReadoutStep>(steps[i])) {
                break;
            }
            std::visit(Overloaded{
                           [&](const ApplyStep &s) {
                               evolve(w, *s.op);
                           },
                           [&](const EraseStep &s) {
                               require_fresh(w.global, s);
                               evolve(w, *s.op);
                           },
                           [](const ReadoutStep &) {
                           },
                       },
                       steps[i]);
        }
        return i;
    }

    ReadoutEval evaluate(const WorldState &w, const ReadoutStep &step) const {
        size_t position = schedule_.layout().position(step.register_name);
        std::vector<double> dist = marginal(w.followed, position);
        double total = 0;
        for (auto &x : dist) {
            if (x < BRANCH_PRUNE_THRESHOLD) {
                x = 0;
            }
            total += x;
        }
        for (auto &x : dist) {
            x /= total;
        }
        bool sampled = interpretation_ == Interpretation::COLLAPSE || step.kind == ReadoutKind::TERMINAL ||
                       options_.follow_branches;
        return {position, std::move(dist), sampled};
    }

    void condition(WorldState &w, size_t position, size_t value) const {
        if (interpretation_ == Interpretation::COLLAPSE) {
            w.global = normalize(project(w.global, position, value));
            w.followed = w.global;
            return;
        }
        if (position == 0 && schedule_.layout().has_observer()) {
            w.followed = normalize(project(w.global, 0, value));
        } else {
            w.followed = normalize(project(w.followed, position, value));
        }
        w.tracks_global = false;
    }

   private:
    void evolve(WorldState &w, const Operator &op) const {
        w.global = apply(op, w.global);
        if (interpretation_ == Interpretation::COLLAPSE || w.tracks_global) {
            w.followed = w.global;
            return;
        }
        std::optional<size_t> before = single_macrostate(w.followed);
        w.followed = apply(op, w.followed);
        std::optional<size_t> after = single_macrostate(w.followed);
        // An observer whose branch moves into one macrostate lives in the
        // whole global sector of that macrostate. A branch that stays in its
        // macrostate keeps any conditioning from earlier readouts.
        if (after.has_value() && before != after) {
            w.followed = normalize(project(w.global, 0, *after));
        }
    }

    std::optional<size_t> single_macrostate(const StateVector &psi) const {
        if (!schedule_.layout().has_observer()) {
            return std::nullopt;
        }
        std::vector<double> m = marginal(psi, 0);
        std::optional<size_t> found;
        for (size_t k = 0; k < m.size(); k++) {
            if (m[k] >= BRANCH_PRUNE_THRESHOLD) {
                if (found.has_value()) {
                    return std::nullopt;
                }
                found = k;
            }
        }
        return found;
    }

    void require_fresh(const StateVector &psi, const EraseStep &step) const {
        size_t position = schedule_.layout().position(step.ancilla);
        std::vector<double> m = marginal(psi, position);
        if (step.reference_value >= m.size()) {
            throw std::invalid_argument(fmt::format("reference value out of range for '{}'", step.ancilla));
        }
        double total = psi.squared_norm();
        if (m[step.reference_value] < total * (1 - NORMALIZATION_TOLERANCE)) {
            throw std::domain_error(
                fmt::format("{}: ancilla '{}' is not in its reference state", step.label, step.ancilla));
        }
    }

    const Schedule &schedule_;
    Interpretation interpretation_;
    ExecutionOptions options_;
};

void validate_operator(const Schedule &schedule, const Operator &op, const std::string &label) {
    if (op.dim() != schedule.layout().total_dim()) {
        throw std::invalid_argument(fmt::format("step '{}': operator dim {} does not match layout dim {}", label,
                                                op.dim(), schedule.layout().total_dim()));
    }
}

}  // namespace

std::string_view interpretation_name(Interpretation interpretation) {
    switch (interpretation) {
        case Interpretation::MANY_WORLDS:
            return "mwi";
        case Interpretation::COLLAPSE:
            return "collapse";
    }
    throw std::invalid_argument("unknown interpretation");
}

Interpretation parse_interpretation(std::string_view text) {
    if (text == "mwi") {
        return Interpretation::MANY_WORLDS;
    }
    if (text == "collapse") {
        return Interpretation::COLLAPSE;
    }
    throw std::invalid_argument(fmt::format("unknown interpretation '{}'", text));
}

Schedule &Schedule::apply(std::string label, Operator op) {
    return apply(std::move(label), std::make_shared<const Operator>(std::move(op)));
}

Schedule &Schedule::apply(std::string label, std::shared_ptr<const Operator> op) {
    validate_operator(*this, *op, label);
    steps_.push_back(ApplyStep{std::move(label), std::move(op)});
    return *this;
}

Schedule &Schedule::erase(std::string label, Operator op, std::string ancilla, size_t reference_value) {
    return erase(std::move(label), std::make_shared<const Operator>(std::move(op)), std::move(ancilla),
                 reference_value);
}

Schedule &Schedule::erase(std::string label, std::shared_ptr<const Operator> op, std::string ancilla,
                          size_t reference_value) {
    validate_operator(*this, *op, label);
    const Register &r = layout_.reg(ancilla);
    if (reference_value >= r.dim) {
        throw std::invalid_argument(fmt::format("reference value {} out of range for '{}'", reference_value, ancilla));
    }
    steps_.push_back(EraseStep{std::move(label), std::move(op), std::move(ancilla), reference_value});
    return *this;
}

Schedule &Schedule::readout(std::string register_name, ReadoutKind kind) {
    layout_.position(register_name);
    steps_.push_back(ReadoutStep{std::move(register_name), kind});
    return *this;
}

size_t Schedule::num_readouts() const {
    size_t n = 0;
    for (const auto &s : steps_) {
        n += std::holds_alternative<ReadoutStep>(s);
    }
    return n;
}

ExecutionTrace execute(const Schedule &schedule, const StateVector &initial, Interpretation interpretation,
                       RandomStream &rng, ExecutionOptions options) {
    Runner runner(schedule, interpretation, options);
    WorldState w = runner.start(initial);
    std::vector<ReadoutRecord> readouts;
    const auto &steps = schedule.steps();
    for (size_t i = runner.advance(w, 0); i < steps.size(); i = runner.advance(w, i + 1)) {
        const auto &step = std::get<ReadoutStep>(steps[i]);
        ReadoutEval eval = runner.evaluate(w, step);
        ReadoutRecord record{step.register_name, step.kind, eval.distribution, std::nullopt, 0};
        if (eval.sampled) {
            size_t r = sample_index(eval.distribution, rng);
            record.outcome = r;
            record.probability = eval.distribution[r];
            runner.condition(w, eval.position, r);
        }
        readouts.push_back(std::move(record));
    }
    return {std::move(readouts), std::move(w.global), std::move(w.followed)};
}

struct OutcomeTree::Node {
    // Readout node fields.
    std::optional<ReadoutRecord> readout;
    bool sampled = false;
    /// Sampled: one slot per register value, null where the probability is 0.
    /// Unsampled: a single child.
    std::vector<std::unique_ptr<Node>> children;
    // Leaf fields.
    std::optional<StateVector> final_state;
    std::optional<StateVector> followed_state;
};

namespace {

std::unique_ptr<OutcomeTree::Node> build_node(const Schedule &schedule, const Runner &runner, WorldState w, size_t from,
                                              size_t &node_count) {
    if (++node_count > MAX_TREE_NODES) {
        throw std::length_error("outcome tree exceeds the node limit");
    }
    auto node = std::make_unique<OutcomeTree::Node>();
    size_t i = runner.advance(w, from);
    const auto &steps = schedule.steps();
    if (i == steps.size()) {
        node->final_state = std::move(w.global);
        node->followed_state = std::move(w.followed);
        return node;
    }
    const auto &step = std::get<ReadoutStep>(steps[i]);
    ReadoutEval eval = runner.evaluate(w, step);
    node->readout = ReadoutRecord{step.register_name, step.kind, eval.distribution, std::nullopt, 0};
    node->sampled = eval.sampled;
    if (!eval.sampled) {
        node->children.push_back(build_node(schedule, runner, std::move(w), i + 1, node_count));
        return node;
    }
    node->children.resize(eval.distribution.size());
    for (size_t r = 0; r < eval.distribution.size(); r++) {
        if (eval.distribution[r] == 0) {
            continue;
        }
        WorldState branch = w;
        runner.condition(branch, eval.position, r);
        node->children[r] = build_node(schedule, runner, std::move(branch), i + 1, node_count);
    }
    return node;
}

const OutcomeTree::Node *walk(const OutcomeTree::Node *node, RandomStream &rng, std::vector<ReadoutRecord> &out) {
    while (node->readout.has_value()) {
        ReadoutRecord record = *node->readout;
        if (!node->sampled) {
            out.push_back(std::move(record));
            node = node->children.front().get();
            continue;
        }
        size_t r = sample_index(record.distribution, rng);
        record.outcome = r;
        record.probability = record.distribution[r];
        out.push_back(std::move(record));
        node = node->children[r].get();
    }
    return node;
}

void collect_paths(const OutcomeTree::Node *node, std::vector<std::optional<size_t>> &prefix, double probability,
                   std::vector<OutcomePath> &out) {
    if (!node->readout.has_value()) {
        out.push_back({prefix, probability});
        return;
    }
    if (!node->sampled) {
        prefix.push_back(std::nullopt);
        collect_paths(node->children.front().get(), prefix, probability, out);
        prefix.pop_back();
        return;
    }
    const auto &dist = node->readout->distribution;
    for (size_t r = 0; r < dist.size(); r++) {
        if (node->children[r] == nullptr) {
            continue;
        }
        prefix.push_back(r);
        collect_paths(node->children[r].get(), prefix, probability * dist[r], out);
        prefix.pop_back();
    }
}

void accumulate_distribution(const OutcomeTree::Node *node, size_t depth, size_t target, double probability,
                             std::vector<double> &out) {
    if (!node->readout.has_value()) {
        return;
    }
    const auto &dist = node->readout->distribution;
    if (depth == target) {
        if (out.empty()) {
            out.assign(dist.size(), 0.0);
        }
        for (size_t r = 0; r < dist.size(); r++) {
            out[r] += probability * dist[r];
        }
        return;
    }
    if (!node->sampled) {
        accumulate_distribution(node->children.front().get(), depth + 1, target, probability, out);
        return;
    }
    for (size_t r = 0; r < dist.size(); r++) {
        if (node->children[r] != nullptr) {
            accumulate_distribution(node->children[r].get(), depth + 1, target, probability * dist[r], out);
        }
    }
}

}  // namespace

OutcomeTree::OutcomeTree(const Schedule &schedule, const StateVector &initial, Interpretation interpretation,
                         ExecutionOptions options)
    : num_readouts_(schedule.num_readouts()) {
    Runner runner(schedule, interpretation, options);
    size_t node_count = 0;
    root_ = build_node(schedule, runner, runner.start(initial), 0, node_count);
}

OutcomeTree::~OutcomeTree() = default;
OutcomeTree::OutcomeTree(OutcomeTree &&) noexcept = default;
OutcomeTree &OutcomeTree::operator=(OutcomeTree &&) noexcept = default;

ExecutionTrace OutcomeTree::sample(RandomStream &rng) const {
    std::vector<ReadoutRecord> readouts;
    const Node *leaf = walk(root_.get(), rng, readouts);
    return {std::move(readouts), *leaf->final_state, *leaf->followed_state};
}

std::vector<ReadoutRecord> OutcomeTree::sample_readouts(RandomStream &rng) const {
    std::vector<ReadoutRecord> readouts;
    walk(root_.get(), rng, readouts);
    return readouts;
}

std::vector<OutcomePath> OutcomeTree::paths() const {
    std::vector<OutcomePath> out;
    std::vector<std::optional<size_t>> prefix;
    collect_paths(root_.get(), prefix, 1.0, out);
    return out;
}

std::vector<double> OutcomeTree::exact_distribution(size_t readout_index) const {
    if (readout_index >= num_readouts_) {
        throw std::out_of_range(fmt::format("readout {} out of range", readout_index));
    }
    std::vector<double> out;
    accumulate_distribution(root_.get(), 0, readout_index, 1.0, out);
    return out;
}

std::vector<double> empirical_distribution(std::span<const ExecutionTrace> traces, size_t readout_index) {
    if (traces.empty()) {
        throw std::invalid_argument("empty trace set");
    }
    size_t dim = 0;
    std::vector<double> histogram;
    std::vector<double> mean;
    size_t sampled = 0;
    for (const auto &t : traces) {
        if (readout_index >= t.readouts.size()) {
            throw std::invalid_argument("trace set has inconsistent readout counts");
        }
        const auto &r = t.readouts[readout_index];
        if (dim == 0) {
            dim = r.distribution.size();
            histogram.assign(dim, 0.0);
            mean.assign(dim, 0.0);
        } else if (r.distribution.size() != dim) {
            throw std::invalid_argument("trace set has inconsistent register dimensions");
        }
        for (size_t k = 0; k < dim; k++) {
            mean[k] += r.distribution[k];
        }
        if (r.outcome.has_value()) {
            histogram[*r.outcome] += 1;
            sampled++;
        }
    }
    if (sampled > 0) {
        for (auto &x : histogram) {
            x /= static_cast<double>(sampled);
        }
        return histogram;
    }
    for (auto &x : mean) {
        x /= static_cast<double>(traces.size());
    }
    return mean;
}

bool statistics_equal(std::span<const ExecutionTrace> a, std::span<const ExecutionTrace> b, double tolerance) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("statistics_equal needs non-empty trace sets");
    }
    size_t n = a.front().readouts.size();
    if (b.front().readouts.size() != n) {
        throw std::invalid_argument("trace sets come from schedules of different shape");
    }
    for (size_t k = 0; k < n; k++) {
        std::vector<double> da = empirical_distribution(a, k);
        std::vector<double> db = empirical_distribution(b, k);
        if (da.size() != db.size()) {
            throw std::invalid_argument("trace sets come from schedules of different shape");
        }
        for (size_t v = 0; v < da.size(); v++) {
            if (std::abs(da[v] - db[v]) > tolerance) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace branchsim
