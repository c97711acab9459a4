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

#ifndef BRANCHSIM_PROTOCOLS_H
#define BRANCHSIM_PROTOCOLS_H

#include <cstddef>
#include <optional>
#include <string_view>

#include "branchsim/interpretations.h"
#include "branchsim/linalg.h"
#include "branchsim/observer.h"
#include "branchsim/random.h"

namespace branchsim {

// ---------------------------------------------------------------------------
// Reversible measurement of a spin's z component.
// ---------------------------------------------------------------------------

enum class DeutschMode {
    REVERSIBLE,
    ENVIRONMENT_DUMP,
};

std::string_view deutsch_mode_name(DeutschMode mode);
/// Accepts "reversible" and "dump".
DeutschMode parse_deutsch_mode(std::string_view text);

struct DeutschConfig {
    DeutschMode mode = DeutschMode::REVERSIBLE;
};

namespace deutsch {

inline constexpr const char *MEMORY = "memory";
inline constexpr const char *SPIN = "spin";
inline constexpr const char *RECORD = "record";

inline constexpr size_t UNMEASURED = 0;
inline constexpr size_t SAW_UP = 1;
inline constexpr size_t SAW_DOWN = 2;
inline constexpr size_t UP = 0;
inline constexpr size_t DOWN = 1;

}  // namespace deutsch

/// memory(3, observer) ⊗ spin(2), plus record(3, ancilla) for the dump mode.
SpaceLayout deutsch_layout(DeutschMode mode);
/// |unmeasured⟩|+x⟩, with the record ancilla (if any) in |0⟩.
StateVector deutsch_initial_state(const SpaceLayout &layout);

/// Controlled copy of the spin's z value into the memory register:
/// |s⟩ flips memory between "unmeasured" and "saw s". The spin is untouched.
Operator build_measurement_unitary(const SpaceLayout &layout);
/// Adjoint of the measurement unitary.
Operator build_reversal_unitary(const SpaceLayout &layout);
/// Copies the memory value into the record ancilla, then resets the memory
/// to "unmeasured" controlled on the copied value. Only meaningful when the
/// record starts in |0⟩; the schedule enforces that.
Operator build_dump_unitary(const SpaceLayout &layout);

/// measure → memory readout → reverse (or dump) → Hadamard on spin → spin
/// readout. The final readout's value 0 is x-up.
Schedule deutsch_schedule(const DeutschConfig &config);

struct DeutschResult {
    double p_x_up;
    bool exact;
    size_t trials;
};

/// Exact probability of x-up, averaged over every readout history.
DeutschResult run_deutsch(const DeutschConfig &config, Interpretation interpretation);
/// Empirical probability of x-up over `trials` single-world runs drawn from
/// one stream.
DeutschResult run_deutsch(const DeutschConfig &config, Interpretation interpretation, RandomStream &rng, size_t trials);

// ---------------------------------------------------------------------------
// Backup, branching cycle and memory erasure.
// ---------------------------------------------------------------------------

enum class Scenario {
    UNCORRELATED,
    CORRELATED_BACKUP,
};

std::string_view scenario_name(Scenario scenario);
/// Accepts "uncorrelated" and "correlated".
Scenario parse_scenario(std::string_view text);

/// Largest macrostate count accepted: the dense layout grows as M².
inline constexpr size_t MAX_MACROSTATES = 16;

struct DisasterConfig {
    double p = 0;
    double q = 0;
    /// Backed-up macrostate. Defaults to the last cycle macrostate.
    std::optional<size_t> backup_index;
    Scenario scenario = Scenario::UNCORRELATED;
    /// Number of cycle macrostates M. Zero picks the smallest count that
    /// realizes q exactly (one disaster macrostate plus the smallest
    /// denominator of q up to MAX_MACROSTATES - 1). An explicit M uses the
    /// fewest disaster macrostates that leave a non-disaster count realizing
    /// q exactly, or one disaster macrostate with q rounded if none does.
    size_t macrostate_count = 0;
};

enum class BranchGroup {
    K1,  // resets because it learned of a disaster
    K2,  // resets pseudo-randomly
    K3,  // does not reset
};

std::string_view branch_group_name(BranchGroup group);

struct CycleOutcome {
    bool reset_occurred;
    /// Present iff reset_occurred.
    std::optional<bool> disaster_after_reset;
    BranchGroup branch_group;
};

namespace disaster {

inline constexpr const char *OBSERVER = "observer";
inline constexpr const char *DISASTER = "disaster";
inline constexpr const char *WORKSPACE = "workspace";
inline constexpr const char *DUMP = "dump";

inline constexpr const char *RESTORED = "restored";
inline constexpr const char *RESTORED_DISASTER_SECTOR = "restored_disaster_sector";

}  // namespace disaster

/// Cycle macrostates (k1, k2, k3 in that order) followed by the two restored
/// successors of the backup. Throws on p or q outside [0, 1] or an
/// unrealizable macrostate count.
MacrostateRegister disaster_macrostates(const DisasterConfig &cfg);
/// observer(M+2) ⊗ disaster(2) ⊗ workspace(2) ⊗ dump(M+1).
SpaceLayout disaster_layout(const DisasterConfig &cfg);
size_t resolved_backup_index(const DisasterConfig &cfg);
/// |O_j⟩|no disaster⟩|workspace 0⟩|dump 0⟩.
StateVector disaster_initial_state(const DisasterConfig &cfg, const SpaceLayout &layout);

/// Sends |O_j⟩|no disaster⟩|ws 0⟩ to Σ_k a_k |O_k⟩|d_k⟩|ws 1⟩ with group
/// weights p, (1-p)q', (1-p)(1-q') (q' the realized q), uniform amplitudes
/// inside each group and d_k = 1 exactly on disaster-aware macrostates.
/// Completed to a unitary by exchanging those two vectors and acting as the
/// identity on their orthogonal complement.
Operator build_cycle_unitary(const DisasterConfig &cfg, const SpaceLayout &layout);
/// For every k1/k2 macrostate k: |O_k⟩|d⟩|dump 0⟩ ↔ |R_d⟩|d⟩|dump k+1⟩, where
/// R_d is the restored successor (correlated_backup: the restored successor
/// of the disaster sector when d = 1). k3 macrostates are untouched.
Operator build_erasure_unitary(const DisasterConfig &cfg, const SpaceLayout &layout);

/// p + (1-p)q.
double p_reset_closed_form(double p, double q);
/// p / (p + (1-p)q). Throws std::domain_error when no reset can happen.
double p_dis_closed_form(double p, double q);

/// Exact branch-weight quantities of one cycle.
struct CycleProbabilities {
    double realized_q;
    double weight_k1;
    double weight_k2;
    double weight_k3;
    /// Weight on the restored macrostates after erasure.
    double p_reset;
    /// Disaster-register weight inside the restored sector, divided by
    /// p_reset. Absent when p_reset is zero.
    std::optional<double> p_dis;
};

/// P(disaster after reset | branch group), from the exact outcome tree.
/// Absent where the group has no reset weight.
struct GroupConditionals {
    std::optional<double> given_k1;
    std::optional<double> given_k2;
};

/// A built disaster cycle: layout, operators, schedule and precomputed
/// outcome trees for both interpretations.
class DisasterProtocol {
   public:
    explicit DisasterProtocol(DisasterConfig cfg);

    const DisasterConfig &config() const {
        return cfg_;
    }
    const MacrostateRegister &macrostates() const {
        return macrostates_;
    }
    const SpaceLayout &layout() const {
        return layout_;
    }
    double realized_q() const {
        return macrostates_.realized_q();
    }
    const StateVector &initial_state() const {
        return initial_;
    }
    const Operator &cycle_unitary() const {
        return *cycle_;
    }
    const Operator &erasure_unitary() const {
        return *erasure_;
    }
    /// cycle → observer readout → erasure → observer readout → disaster
    /// readout (terminal).
    const Schedule &schedule() const {
        return schedule_;
    }
    const OutcomeTree &tree(Interpretation interpretation) const;

    BranchGroup group_of(size_t macrostate) const;
    bool is_restored(size_t macrostate) const;

    StateVector post_cycle_state() const;
    StateVector post_erasure_state() const;
    CycleProbabilities exact() const;
    GroupConditionals conditionals(Interpretation interpretation) const;

    CycleOutcome run(Interpretation interpretation, RandomStream &rng) const;
    CycleOutcome outcome_from(const std::vector<ReadoutRecord> &readouts) const;

   private:
    DisasterConfig cfg_;
    MacrostateRegister macrostates_;
    SpaceLayout layout_;
    StateVector initial_;
    std::shared_ptr<const Operator> cycle_;
    std::shared_ptr<const Operator> erasure_;
    Schedule schedule_;
    OutcomeTree mwi_tree_;
    OutcomeTree collapse_tree_;
};

/// One trial of the cycle. Builds the protocol on every call; use
/// DisasterProtocol::run for repeated trials.
CycleOutcome run_disaster_cycle(const DisasterConfig &cfg, Interpretation interpretation, RandomStream &rng);

}  // namespace branchsim

#endif
