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

#include "branchsim/protocols.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "branchsim/observer.h"

using namespace branchsim;

namespace {

std::vector<size_t> digits_of(const StateVector &psi, size_t index) {
    return psi.layout().to_digits(index);
}

/// Indices of nonzero amplitudes.
std::vector<size_t> support(const StateVector &psi) {
    std::vector<size_t> out;
    for (size_t k = 0; k < psi.size(); k++) {
        if (std::norm(psi[k]) > 1e-20) {
            out.push_back(k);
        }
    }
    return out;
}

const double GRID_P[] = {0, 0.01, 0.1, 0.2, 0.5, 0.9, 1};
const double GRID_Q[] = {0, 0.1, 0.25, 0.5, 1};

}  // namespace

TEST(deutsch, measurement_basis_action) {
    SpaceLayout layout = deutsch_layout(DeutschMode::REVERSIBLE);
    Operator u = build_measurement_unitary(layout);
    for (size_t s : {deutsch::UP, deutsch::DOWN}) {
        std::vector<size_t> in{deutsch::UNMEASURED, s};
        std::vector<size_t> expected{deutsch::SAW_UP + s, s};
        ASSERT_EQ(apply(u, StateVector::basis(layout, in)), StateVector::basis(layout, expected));
    }
    ASSERT_LE(unitarity_defect(u), UNITARITY_TOLERANCE);
}

TEST(deutsch, reversal_undoes_measurement) {
    SpaceLayout layout = deutsch_layout(DeutschMode::REVERSIBLE);
    Operator product = compose(build_reversal_unitary(layout), build_measurement_unitary(layout));
    ASSERT_EQ(product, Operator::identity(layout.total_dim()));
}

TEST(deutsch, dump_records_result_and_resets_memory) {
    SpaceLayout layout = deutsch_layout(DeutschMode::ENVIRONMENT_DUMP);
    Operator dump = build_dump_unitary(layout);
    for (size_t s : {deutsch::UP, deutsch::DOWN}) {
        std::vector<size_t> in{deutsch::SAW_UP + s, s, 0};
        std::vector<size_t> expected{deutsch::UNMEASURED, s, deutsch::SAW_UP + s};
        ASSERT_EQ(apply(dump, StateVector::basis(layout, in)), StateVector::basis(layout, expected));
    }
    ASSERT_LE(unitarity_defect(dump), UNITARITY_TOLERANCE);
    ASSERT_THROW(build_dump_unitary(deutsch_layout(DeutschMode::REVERSIBLE)), std::invalid_argument);
}

TEST(deutsch, exact_predictions) {
    DeutschConfig reversible{DeutschMode::REVERSIBLE};
    DeutschConfig dump{DeutschMode::ENVIRONMENT_DUMP};
    ASSERT_NEAR(run_deutsch(reversible, Interpretation::MANY_WORLDS).p_x_up, 1.0, 1e-12);
    ASSERT_NEAR(run_deutsch(reversible, Interpretation::COLLAPSE).p_x_up, 0.5, 1e-12);
    ASSERT_NEAR(run_deutsch(dump, Interpretation::MANY_WORLDS).p_x_up, 0.5, 1e-12);
    ASSERT_NEAR(run_deutsch(dump, Interpretation::COLLAPSE).p_x_up, 0.5, 1e-12);
}

TEST(deutsch, sampled_predictions) {
    RandomStream rng(101);
    DeutschConfig reversible{DeutschMode::REVERSIBLE};
    DeutschResult mwi = run_deutsch(reversible, Interpretation::MANY_WORLDS, rng, 10000);
    ASSERT_EQ(mwi.p_x_up, 1.0);
    ASSERT_FALSE(mwi.exact);
    DeutschResult collapse = run_deutsch(reversible, Interpretation::COLLAPSE, rng, 10000);
    ASSERT_NEAR(collapse.p_x_up, 0.5, 0.02);
    ASSERT_THROW(run_deutsch(reversible, Interpretation::COLLAPSE, rng, 0), std::invalid_argument);
}

TEST(deutsch, mode_names) {
    ASSERT_EQ(parse_deutsch_mode("dump"), DeutschMode::ENVIRONMENT_DUMP);
    ASSERT_EQ(deutsch_mode_name(DeutschMode::REVERSIBLE), "reversible");
    ASSERT_THROW(parse_deutsch_mode("partial"), std::invalid_argument);
}

TEST(disaster_macrostates, minimal_automatic_count) {
    // q = 1/2 needs two non-disaster macrostates.
    MacrostateRegister reg = disaster_macrostates({.p = 0.1, .q = 0.5});
    ASSERT_EQ(reg.count(), 3u + 2u);
    ASSERT_EQ(reg.realized_q(), 0.5);
    ASSERT_EQ(disaster_macrostates({.p = 0.1, .q = 0.1}).count() - 2, 11u);
    ASSERT_EQ(disaster_macrostates({.p = 0.1, .q = 0.25}).count() - 2, 5u);
    ASSERT_EQ(disaster_macrostates({.p = 0.1, .q = 0}).count() - 2, 2u);
}

TEST(disaster_macrostates, explicit_count_keeps_q_exact_when_possible) {
    MacrostateRegister reg = disaster_macrostates({.p = 0.2, .q = 0.5, .macrostate_count = 8});
    ASSERT_EQ(reg.count(), 10u);
    ASSERT_EQ(reg.realized_q(), 0.5);
    // Seven non-disaster macrostates cannot realize 1/3; six can.
    ASSERT_DOUBLE_EQ(disaster_macrostates({.p = 0.2, .q = 1.0 / 3, .macrostate_count = 8}).realized_q(), 1.0 / 3);
    // No split of four realizes 0.3: one disaster macrostate and rounding.
    MacrostateRegister rounded = disaster_macrostates({.p = 0.2, .q = 0.3, .macrostate_count = 4});
    ASSERT_DOUBLE_EQ(rounded.realized_q(), 1.0 / 3);
}

TEST(disaster_macrostates, errors) {
    ASSERT_THROW(disaster_macrostates({.p = -0.1, .q = 0.5}), std::invalid_argument);
    ASSERT_THROW(disaster_macrostates({.p = 0.1, .q = 1.5}), std::invalid_argument);
    ASSERT_THROW(disaster_macrostates({.p = NAN, .q = 0.5}), std::invalid_argument);
    ASSERT_THROW(disaster_macrostates({.p = 0.1, .q = 0.5, .macrostate_count = 1}), std::invalid_argument);
    ASSERT_THROW(disaster_macrostates({.p = 0.1, .q = 0.5, .macrostate_count = 17}), std::invalid_argument);
    ASSERT_THROW(resolved_backup_index({.p = 0.1, .q = 0.5, .backup_index = 3}), std::invalid_argument);
    ASSERT_EQ(resolved_backup_index({.p = 0.1, .q = 0.5}), 2u);
}

TEST(disaster_cycle, group_weights_for_reference_point) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5, .macrostate_count = 8});
    BranchDecomposition d = decompose(protocol.post_cycle_state());
    double sums[3] = {0, 0, 0};
    for (const auto &b : d.branches) {
        sums[static_cast<size_t>(protocol.group_of(b.macrostate_index))] += b.weight;
    }
    ASSERT_NEAR(sums[0], 0.2, 1e-12);
    ASSERT_NEAR(sums[1], 0.4, 1e-12);
    ASSERT_NEAR(sums[2], 0.4, 1e-12);
}

TEST(disaster_cycle, disaster_register_marks_exactly_the_k1_branches) {
    DisasterProtocol protocol({.p = 0.3, .q = 0.25});
    StateVector psi = protocol.post_cycle_state();
    size_t disaster = psi.layout().position(disaster::DISASTER);
    for (size_t index : support(psi)) {
        auto digits = digits_of(psi, index);
        bool k1 = protocol.group_of(digits[0]) == BranchGroup::K1;
        ASSERT_EQ(digits[disaster], k1 ? 1u : 0u);
    }
}

TEST(disaster_cycle, uniform_amplitudes_inside_groups) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5, .macrostate_count = 8});
    BranchDecomposition d = decompose(protocol.post_cycle_state());
    // 2 disaster, 3 reset and 3 steady macrostates.
    double expected[3] = {0.2 / 2, 0.4 / 3, 0.4 / 3};
    ASSERT_EQ(d.branches.size(), 8u);
    for (const auto &b : d.branches) {
        ASSERT_NEAR(b.weight, expected[static_cast<size_t>(protocol.group_of(b.macrostate_index))], 1e-12);
    }
}

TEST(disaster_cycle, reset_probability_after_erasure) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5, .macrostate_count = 8});
    CycleProbabilities exact = protocol.exact();
    ASSERT_NEAR(exact.p_reset, 0.2 + 0.8 * 0.5, 1e-12);
    ASSERT_NEAR(*exact.p_dis, 0.2 / 0.6, 1e-12);
}

TEST(disaster_cycle, dump_records_distinguish_k1_from_k2) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5});
    StateVector psi = protocol.post_erasure_state();
    size_t dump = psi.layout().position(disaster::DUMP);
    std::set<size_t> records;
    for (size_t index : support(psi)) {
        auto digits = digits_of(psi, index);
        if (protocol.is_restored(digits[0])) {
            ASSERT_NE(digits[dump], 0u);
            ASSERT_TRUE(records.insert(digits[dump]).second);
        } else {
            ASSERT_EQ(protocol.group_of(digits[0]), BranchGroup::K3);
            ASSERT_EQ(digits[dump], 0u);
        }
    }
    // One disaster and one reset macrostate reset; each leaves its own record.
    ASSERT_EQ(records.size(), 2u);
}

TEST(disaster_cycle, operators_are_unitary_on_the_grid) {
    for (double p : GRID_P) {
        for (double q : GRID_Q) {
            for (Scenario sc : {Scenario::UNCORRELATED, Scenario::CORRELATED_BACKUP}) {
                DisasterProtocol protocol({.p = p, .q = q, .scenario = sc});
                ASSERT_LE(unitarity_defect(protocol.cycle_unitary()), UNITARITY_TOLERANCE) << p << " " << q;
                ASSERT_LE(unitarity_defect(protocol.erasure_unitary()), UNITARITY_TOLERANCE) << p << " " << q;
            }
        }
    }
}

TEST(disaster_cycle, exact_weights_match_closed_forms_on_the_grid) {
    for (double p : GRID_P) {
        for (double q : GRID_Q) {
            DisasterProtocol protocol({.p = p, .q = q});
            CycleProbabilities exact = protocol.exact();
            double qr = exact.realized_q;
            ASSERT_EQ(qr, q);
            ASSERT_NEAR(exact.weight_k1, p, 1e-12);
            ASSERT_NEAR(exact.weight_k2, (1 - p) * q, 1e-12);
            ASSERT_NEAR(exact.weight_k3, (1 - p) * (1 - q), 1e-12);
            ASSERT_NEAR(exact.p_reset, p_reset_closed_form(p, qr), 1e-10);
            if (p == 0 && q == 0) {
                ASSERT_FALSE(exact.p_dis.has_value());
                continue;
            }
            ASSERT_NEAR(*exact.p_dis, p_dis_closed_form(p, qr), 1e-10);
            ASSERT_NEAR(exact.p_reset * *exact.p_dis, p, 1e-12);
        }
    }
}

TEST(disaster_cycle, closed_forms) {
    ASSERT_NEAR(p_reset_closed_form(0.01, 0.1), 0.109, 1e-15);
    ASSERT_NEAR(p_dis_closed_form(0.01, 0.1), 0.01 / 0.109, 1e-15);
    ASSERT_EQ(p_dis_closed_form(0, 0.5), 0.0);
    ASSERT_EQ(p_dis_closed_form(1, 0), 1.0);
    ASSERT_THROW(p_dis_closed_form(0, 0), std::domain_error);
    ASSERT_THROW(p_reset_closed_form(1.1, 0), std::invalid_argument);
}

TEST(disaster_cycle, conditionals_separate_interpretations_when_uncorrelated) {
    DisasterProtocol protocol({.p = 0.1, .q = 0.25});
    double p_dis = p_dis_closed_form(0.1, 0.25);
    GroupConditionals mwi = protocol.conditionals(Interpretation::MANY_WORLDS);
    GroupConditionals collapse = protocol.conditionals(Interpretation::COLLAPSE);
    ASSERT_NEAR(*mwi.given_k1, p_dis, 1e-12);
    ASSERT_NEAR(*mwi.given_k2, p_dis, 1e-12);
    ASSERT_NEAR(*collapse.given_k1, 1.0, 1e-12);
    ASSERT_NEAR(*collapse.given_k2, 0.0, 1e-12);
}

TEST(disaster_cycle, correlated_backup_keeps_the_cause) {
    DisasterProtocol protocol({.p = 0.1, .q = 0.25, .scenario = Scenario::CORRELATED_BACKUP});
    for (Interpretation interp : {Interpretation::MANY_WORLDS, Interpretation::COLLAPSE}) {
        GroupConditionals c = protocol.conditionals(interp);
        ASSERT_NEAR(*c.given_k1, 1.0, 1e-12);
        ASSERT_NEAR(*c.given_k2, 0.0, 1e-12);
    }
}

TEST(disaster_cycle, marginal_reset_statistics_agree_across_interpretations) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5});
    const OutcomeTree &mwi = protocol.tree(Interpretation::MANY_WORLDS);
    const OutcomeTree &collapse = protocol.tree(Interpretation::COLLAPSE);
    for (size_t r = 0; r < 3; r++) {
        std::vector<double> a = mwi.exact_distribution(r);
        std::vector<double> b = collapse.exact_distribution(r);
        for (size_t k = 0; k < a.size(); k++) {
            ASSERT_NEAR(a[k], b[k], 1e-12) << r;
        }
    }
}

TEST(disaster_cycle, absent_conditionals) {
    GroupConditionals none = DisasterProtocol({.p = 0, .q = 0}).conditionals(Interpretation::MANY_WORLDS);
    ASSERT_FALSE(none.given_k1.has_value());
    ASSERT_FALSE(none.given_k2.has_value());
    GroupConditionals only_k2 = DisasterProtocol({.p = 0, .q = 0.5}).conditionals(Interpretation::MANY_WORLDS);
    ASSERT_FALSE(only_k2.given_k1.has_value());
    ASSERT_NEAR(*only_k2.given_k2, 0.0, 1e-15);
}

TEST(disaster_cycle, sampled_outcomes_are_consistent) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5});
    RandomStream rng(7);
    size_t resets = 0;
    const size_t n = 20000;
    for (size_t t = 0; t < n; t++) {
        CycleOutcome o = protocol.run(Interpretation::COLLAPSE, rng);
        ASSERT_EQ(o.reset_occurred, o.branch_group != BranchGroup::K3);
        ASSERT_EQ(o.disaster_after_reset.has_value(), o.reset_occurred);
        if (o.reset_occurred) {
            resets++;
            ASSERT_EQ(*o.disaster_after_reset, o.branch_group == BranchGroup::K1);
        }
    }
    ASSERT_NEAR(static_cast<double>(resets) / n, 0.6, 0.015);
}

TEST(disaster_cycle, stale_dump_register_is_rejected) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5});
    std::vector<size_t> digits{resolved_backup_index(protocol.config()), 0, 0, 1};
    StateVector stale = StateVector::basis(protocol.layout(), digits);
    RandomStream rng(1);
    ASSERT_THROW(execute(protocol.schedule(), stale, Interpretation::MANY_WORLDS, rng), std::domain_error);
}

TEST(disaster_cycle, outcome_from_rejects_short_traces) {
    DisasterProtocol protocol({.p = 0.2, .q = 0.5});
    std::vector<ReadoutRecord> none;
    ASSERT_THROW(protocol.outcome_from(none), std::invalid_argument);
    ASSERT_THROW(protocol.group_of(protocol.macrostates().index_of(disaster::RESTORED)), std::invalid_argument);
}

TEST(disaster_cycle, scenario_names) {
    ASSERT_EQ(parse_scenario("correlated"), Scenario::CORRELATED_BACKUP);
    ASSERT_EQ(scenario_name(Scenario::UNCORRELATED), "uncorrelated");
    ASSERT_EQ(branch_group_name(BranchGroup::K2), "k2");
    ASSERT_THROW(parse_scenario("sometimes"), std::invalid_argument);
}
