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

#include <gtest/gtest.h>

#include "test_util.h"

using namespace branchsim;
using namespace branchsim::testing;

namespace {

SpaceLayout observer_layout(size_t observer_dim, size_t env_dim) {
    return SpaceLayout({{"observer", observer_dim, RegisterRole::OBSERVER}, {"env", env_dim}});
}

/// a|0⟩|e0⟩ + b|1⟩|e1⟩ with a² = 0.3, b² = 0.7.
StateVector two_branch_state() {
    SpaceLayout layout = observer_layout(2, 2);
    return StateVector(layout, {std::sqrt(0.3), 0, 0, std::sqrt(0.7)});
}

}  // namespace

TEST(MacrostateRegister, partitioned_counts_and_flags) {
    auto reg = MacrostateRegister::partitioned(1, 6, 0.5, {"restored"});
    ASSERT_EQ(reg.count(), 8u);
    ASSERT_TRUE(reg[0].knows_disaster);
    ASSERT_EQ(reg[1].label, "reset_0");
    ASSERT_TRUE(reg[3].reset_scheduled);
    ASSERT_FALSE(reg[4].reset_scheduled);
    ASSERT_EQ(reg[4].label, "steady_0");
    ASSERT_TRUE(reg[7].restored);
    ASSERT_EQ(reg.index_of("restored"), 7u);
    ASSERT_DOUBLE_EQ(reg.realized_q(), 0.5);
}

TEST(MacrostateRegister, realized_q_rounds_to_nearest) {
    // q = 0.1 over 7 non-disaster states schedules llround(0.7) = 1.
    ASSERT_DOUBLE_EQ(MacrostateRegister::partitioned(1, 7, 0.1).realized_q(), 1.0 / 7);
    ASSERT_DOUBLE_EQ(MacrostateRegister::partitioned(1, 4, 0.0).realized_q(), 0.0);
    ASSERT_DOUBLE_EQ(MacrostateRegister::partitioned(1, 4, 1.0).realized_q(), 1.0);
}

TEST(MacrostateRegister, errors) {
    ASSERT_THROW(MacrostateRegister({{"only"}}), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister({{"a"}, {"a"}}), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister({{"a", true, true}, {"b"}}), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister({{"a", false, true, true}, {"b"}}), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister::partitioned(1, 0, 0.5), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister::partitioned(1, 4, 1.5), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister::partitioned(1, 4, NAN), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister::partitioned(1, 4, 0.5).index_of("nope"), std::invalid_argument);
    ASSERT_THROW(MacrostateRegister({{"a", true}, {"b", true}}).realized_q(), std::domain_error);
}

TEST(decompose, splits_by_observer_value) {
    BranchDecomposition d = decompose(two_branch_state());
    ASSERT_EQ(d.branches.size(), 2u);
    ASSERT_NEAR(d.weight_of(0), 0.3, 1e-15);
    ASSERT_NEAR(d.weight_of(1), 0.7, 1e-15);
    ASSERT_NEAR(d.total_weight, 1.0, 1e-15);
    ASSERT_EQ(d.branches[1].environment_state.layout().registers()[0].name, "env");
}

TEST(decompose, prunes_negligible_branches) {
    SpaceLayout layout = observer_layout(3, 2);
    StateVector psi(layout, {1, 0, 1e-8, 0, 0, 0});
    BranchDecomposition d = decompose(psi);
    ASSERT_EQ(d.branches.size(), 1u);
    ASSERT_EQ(d.find(1), nullptr);
    ASSERT_EQ(d.weight_of(2), 0.0);
}

TEST(decompose, requires_observer) {
    ASSERT_THROW(decompose(StateVector(qubits({"a"}), {1, 0})), std::invalid_argument);
}

TEST(decompose, reconstruct_round_trips_random_states) {
    RandomStream rng(31);
    for (int trial = 0; trial < 20; trial++) {
        StateVector psi = random_state(observer_layout(4, 3), rng);
        StateVector back = reconstruct(decompose(psi));
        for (size_t k = 0; k < psi.size(); k++) {
            ASSERT_LE(std::abs(back[k] - psi[k]), 1e-15);
        }
    }
}

TEST(decompose, weights_sum_to_squared_norm) {
    RandomStream rng(37);
    for (int trial = 0; trial < 20; trial++) {
        StateVector psi = random_state(observer_layout(5, 4), rng);
        BranchDecomposition d = decompose(psi);
        double total = 0;
        for (const auto &[k, w] : born_weights(d)) {
            total += w;
        }
        ASSERT_NEAR(total, 1.0, 1e-12);
        ASSERT_NEAR(d.total_weight, psi.squared_norm(), 1e-12);
    }
}

TEST(born_weights, zero_state_is_a_domain_error) {
    BranchDecomposition d = decompose(StateVector(observer_layout(2, 2), {0, 0, 0, 0}));
    ASSERT_THROW(born_weights(d), std::domain_error);
    RandomStream rng(1);
    ASSERT_THROW(sample_macrostate(d, rng), std::domain_error);
}

TEST(sample_macrostate, frequencies_follow_born_rule) {
    BranchDecomposition d = decompose(two_branch_state());
    RandomStream rng(41);
    const size_t n = 100000;
    size_t zeros = 0;
    for (size_t k = 0; k < n; k++) {
        zeros += sample_macrostate(d, rng) == 0;
    }
    ASSERT_NEAR(static_cast<double>(zeros) / n, 0.3, 0.01);
}

TEST(collapse_to, is_idempotent_and_normalized) {
    RandomStream rng(43);
    StateVector psi = random_state(observer_layout(3, 3), rng);
    StateVector once = collapse_to(psi, 2);
    StateVector twice = collapse_to(once, 2);
    ASSERT_NEAR(once.squared_norm(), 1, 1e-12);
    for (size_t k = 0; k < psi.size(); k++) {
        ASSERT_LE(std::abs(once[k] - twice[k]), 1e-15);
    }
    BranchDecomposition d = decompose(once);
    ASSERT_EQ(d.branches.size(), 1u);
    ASSERT_EQ(d.branches[0].macrostate_index, 2u);
}

TEST(collapse_to, errors) {
    ASSERT_THROW(collapse_to(two_branch_state(), 5), std::out_of_range);
    StateVector one(observer_layout(2, 2), {1, 0, 0, 0});
    ASSERT_THROW(collapse_to(one, 1), std::domain_error);
    ASSERT_THROW(collapse_to(StateVector(qubits({"a"}), {1, 0}), 0), std::invalid_argument);
}

TEST(marginal, of_environment_register) {
    RandomStream rng(47);
    StateVector psi = random_state(observer_layout(3, 4), rng);
    std::vector<double> m = marginal(psi, 1);
    ASSERT_EQ(m.size(), 4u);
    for (size_t e = 0; e < 4; e++) {
        double expected = 0;
        for (size_t o = 0; o < 3; o++) {
            expected += std::norm(psi[o * 4 + e]);
        }
        ASSERT_NEAR(m[e], expected, 1e-15);
    }
    ASSERT_THROW(marginal(psi, 2), std::out_of_range);
    ASSERT_THROW(project(psi, 1, 4), std::out_of_range);
}
