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

#ifndef BRANCHSIM_INTERPRETATIONS_H
#define BRANCHSIM_INTERPRETATIONS_H

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchsim/linalg.h"
#include "branchsim/random.h"

namespace branchsim {

enum class Interpretation {
    MANY_WORLDS,
    COLLAPSE,
};

std::string_view interpretation_name(Interpretation interpretation);
/// Accepts "mwi" and "collapse".
Interpretation parse_interpretation(std::string_view text);

enum class ReadoutKind {
    INTERMEDIATE,
    TERMINAL,
};

struct ApplyStep {
    std::string label;
    std::shared_ptr<const Operator> op;
};

/// A unitary that dumps information into an ancilla. The ancilla must be in
/// its reference basis state when the step runs.
struct EraseStep {
    std::string label;
    std::shared_ptr<const Operator> op;
    std::string ancilla;
    size_t reference_value = 0;
};

struct ReadoutStep {
    std::string register_name;
    ReadoutKind kind;
};

using ScheduleStep = std::variant<ApplyStep, EraseStep, ReadoutStep>;

/// Ordered circuit schedule over a fixed layout.
class Schedule {
   public:
    explicit Schedule(SpaceLayout layout) : layout_(std::move(layout)) {
    }

    Schedule &apply(std::string label, Operator op);
    Schedule &apply(std::string label, std::shared_ptr<const Operator> op);
    Schedule &erase(std::string label, Operator op, std::string ancilla, size_t reference_value = 0);
    Schedule &erase(std::string label, std::shared_ptr<const Operator> op, std::string ancilla,
                    size_t reference_value = 0);
    Schedule &readout(std::string register_name, ReadoutKind kind);

    const SpaceLayout &layout() const {
        return layout_;
    }
    const std::vector<ScheduleStep> &steps() const {
        return steps_;
    }
    size_t num_readouts() const;

   private:
    SpaceLayout layout_;
    std::vector<ScheduleStep> steps_;
};

struct ReadoutRecord {
    std::string register_name;
    ReadoutKind kind;
    /// Born distribution over the register's values at this point, computed
    /// from the state the trace is following.
    std::vector<double> distribution;
    /// Absent when the readout only recorded weights.
    std::optional<size_t> outcome;
    /// Probability of `outcome` under `distribution` (0 when absent).
    double probability = 0;
};

struct ExecutionTrace {
    std::vector<ReadoutRecord> readouts;
    /// Global state at the end. Under collapse this is the collapsed state.
    StateVector final_state;
    /// Normalized state of the followed branch (equal to final_state under
    /// collapse).
    StateVector followed_state;
};

struct ExecutionOptions {
    /// Many-worlds only: sample intermediate readouts and follow the sampled
    /// branch (bookkeeping, the global state is untouched). When false,
    /// intermediate readouts record weights without an outcome.
    bool follow_branches = true;
};

/// Runs one trial.
///
/// Collapse: every readout samples and projects the state.
///
/// Many-worlds: operators act unitarily on the global state, which readouts
/// never modify. The trace also follows one observer: its world is the global
/// sector of its current macrostate (first register). Whenever an operator
/// moves the followed branch into a single macrostate it did not already
/// occupy, or a readout of the observer register selects one, the followed
/// state becomes that whole sector, so branches that merge into the same
/// macrostate are merged for the observer too. Readouts of other registers
/// condition the followed state until the next such re-expansion.
ExecutionTrace execute(const Schedule &schedule, const StateVector &initial, Interpretation interpretation,
                       RandomStream &rng, ExecutionOptions options = {});

/// One root-to-leaf path through the readout outcomes.
struct OutcomePath {
    /// One entry per readout, absent for weight-only readouts.
    std::vector<std::optional<size_t>> outcomes;
    double probability;
};

/// Every reachable readout history of a schedule, precomputed.
///
/// Sampling walks the tree instead of re-applying operators, and consumes the
/// random stream exactly as `execute` does, so traces are identical for
/// identical streams. The tree is immutable after construction and can be
/// sampled from several threads with separate streams.
class OutcomeTree {
   public:
    OutcomeTree(const Schedule &schedule, const StateVector &initial, Interpretation interpretation,
                ExecutionOptions options = {});
    ~OutcomeTree();
    OutcomeTree(OutcomeTree &&) noexcept;
    OutcomeTree &operator=(OutcomeTree &&) noexcept;

    ExecutionTrace sample(RandomStream &rng) const;
    /// Same draw as `sample` without copying the final states.
    std::vector<ReadoutRecord> sample_readouts(RandomStream &rng) const;
    /// Exact enumeration of all histories with nonzero probability.
    std::vector<OutcomePath> paths() const;
    /// Exact distribution of readout `readout_index`, averaged over all
    /// histories leading to it.
    std::vector<double> exact_distribution(size_t readout_index) const;
    size_t num_readouts() const {
        return num_readouts_;
    }

    struct Node;

   private:
    std::unique_ptr<Node> root_;
    size_t num_readouts_;
};

/// True iff, for every readout position, the empirical outcome distributions
/// of the two sets agree within `tolerance` (max abs difference per value).
/// Readouts without sampled outcomes are compared by their mean recorded
/// distribution instead.
bool statistics_equal(std::span<const ExecutionTrace> a, std::span<const ExecutionTrace> b, double tolerance);

/// Empirical distribution for one readout position, as used by
/// statistics_equal.
std::vector<double> empirical_distribution(std::span<const ExecutionTrace> traces, size_t readout_index);

}  // namespace branchsim

#endif
