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

#ifndef BRANCHSIM_OBSERVER_H
#define BRANCHSIM_OBSERVER_H

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "branchsim/linalg.h"
#include "branchsim/random.h"

namespace branchsim {

/// Branches whose squared norm falls below this are treated as absent.
inline constexpr double BRANCH_PRUNE_THRESHOLD = 1e-15;

struct Macrostate {
    std::string label;
    bool knows_disaster = false;
    bool reset_scheduled = false;
    /// True for the post-erasure successors of the backed-up macrostate.
    bool restored = false;
};

/// The classically describable states an observer can be in.
///
/// For the disaster cycle the register is laid out as: disaster-aware
/// macrostates, then pseudo-random reset macrostates, then steady
/// macrostates, then any restored successors. Only the first three groups
/// ("cycle macrostates") take part in the q fraction.
class MacrostateRegister {
   public:
    explicit MacrostateRegister(std::vector<Macrostate> states);

    /// Builds n_disaster + n_non_disaster cycle macrostates, exactly
    /// round(q * n_non_disaster) of the non-disaster ones flagged
    /// reset_scheduled, followed by the given restored successor labels.
    static MacrostateRegister partitioned(size_t n_disaster, size_t n_non_disaster, double q,
                                          const std::vector<std::string> &restored_labels = {});

    size_t count() const {
        return states_.size();
    }
    const Macrostate &operator[](size_t index) const {
        return states_[index];
    }
    const std::vector<Macrostate> &states() const {
        return states_;
    }
    std::vector<std::string> labels() const;
    size_t index_of(const std::string &label) const;

    /// Fraction of non-disaster cycle macrostates that carry reset_scheduled.
    double realized_q() const;

   private:
    std::vector<Macrostate> states_;
};

/// One term |O_k⟩|U_k⟩ of the observer decomposition.
struct Branch {
    size_t macrostate_index;
    /// Unnormalized state of everything except the observer register.
    StateVector environment_state;
    double weight;
};

struct BranchDecomposition {
    SpaceLayout layout;
    std::vector<Branch> branches;
    double total_weight = 0;

    const Branch *find(size_t macrostate_index) const;
    /// Weight of the given macrostate, 0 if it was pruned.
    double weight_of(size_t macrostate_index) const;
};

/// Splits psi by the value of its observer register (the first register).
/// Branches with weight below BRANCH_PRUNE_THRESHOLD are dropped.
BranchDecomposition decompose(const StateVector &psi);
/// Σ_k |O_k⟩|U_k⟩ over the retained branches.
StateVector reconstruct(const BranchDecomposition &d);

/// (macrostate index, probability) pairs in index order.
std::vector<std::pair<size_t, double>> born_weights(const BranchDecomposition &d);
size_t sample_macrostate(const BranchDecomposition &d, RandomStream &rng);
/// Normalized projection onto one observer macrostate.
StateVector collapse_to(const StateVector &psi, size_t macrostate_index);

/// Squared-norm distribution of one register's values.
std::vector<double> marginal(const StateVector &psi, size_t position);
/// Unnormalized projection onto `value` of the register at `position`.
StateVector project(const StateVector &psi, size_t position, size_t value);

}  // namespace branchsim

#endif
