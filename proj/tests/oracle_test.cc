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

#include "branchsim/oracle.h"

#include <gtest/gtest.h>

#include "branchsim/protocols.h"
#include "branchsim/random.h"

using branchsim::p_dis_closed_form;
using branchsim::p_reset_closed_form;
using branchsim::RandomStream;
using namespace branchsim::classical;

TEST(as_small_ratio, recovers_simple_fractions) {
    ASSERT_EQ(*as_small_ratio(0.1), Rational(1, 10));
    ASSERT_EQ(*as_small_ratio(1.0 / 3), Rational(1, 3));
    ASSERT_EQ(*as_small_ratio(0.0), Rational(0));
    ASSERT_EQ(*as_small_ratio(1.0), Rational(1));
    ASSERT_EQ(*as_small_ratio(0.001), Rational(1, 1000));
    ASSERT_FALSE(as_small_ratio(M_PI / 4).has_value());
    ASSERT_FALSE(as_small_ratio(1.0 / 3, 2).has_value());
}

TEST(enumerate, rational_mode_is_exact) {
    OutcomeTree tree = enumerate(0.01, 0.1);
    ASSERT_TRUE(tree.exact);
    ASSERT_EQ(*tree.exact_reset_mass, Rational(109, 1000));
    ASSERT_EQ(*tree.exact_reset_disaster_mass, Rational(1, 100));
    ASSERT_DOUBLE_EQ(oracle_p_reset(tree), 0.109);
    ASSERT_DOUBLE_EQ(oracle_p_dis(tree), 10.0 / 109);
    ASSERT_DOUBLE_EQ(tree.total_probability(), 1.0);
}

TEST(enumerate, leaves_cover_the_three_paths) {
    OutcomeTree tree = enumerate(Rational(1, 5), Rational(1, 2));
    ASSERT_EQ(tree.leaves.size(), 3u);
    ASSERT_EQ(tree.leaves[0].path, Path::DISASTER_RESET);
    ASSERT_EQ(tree.leaves[0].post_reset, PostReset::DISASTER);
    ASSERT_EQ(*tree.leaves[1].exact, Rational(2, 5));
    ASSERT_EQ(tree.leaves[2].post_reset, PostReset::NOT_RESET);
    ASSERT_EQ(path_label(Path::PSEUDO_RANDOM_RESET), "k2");
}

TEST(enumerate, omits_zero_probability_leaves) {
    ASSERT_EQ(enumerate(0.0, 0.5).leaves.size(), 2u);
    ASSERT_EQ(enumerate(1.0, 0.5).leaves.size(), 1u);
}

TEST(enumerate, double_mode_for_irrational_inputs) {
    OutcomeTree tree = enumerate(M_PI / 10, 0.5);
    ASSERT_FALSE(tree.exact);
    ASSERT_NEAR(tree.total_probability(), 1.0, 1e-15);
    ASSERT_NEAR(oracle_p_reset(tree), M_PI / 10 + (1 - M_PI / 10) * 0.5, 1e-15);
}

TEST(enumerate, rejects_out_of_range) {
    ASSERT_THROW(enumerate(-0.1, 0.5), std::invalid_argument);
    ASSERT_THROW(enumerate(0.1, 2.0), std::invalid_argument);
    ASSERT_THROW(enumerate(NAN, 0.5), std::invalid_argument);
    ASSERT_THROW(enumerate(Rational(3, 2), Rational(1, 2)), std::invalid_argument);
}

TEST(oracle_p_dis, empty_reset_subtree) {
    ASSERT_THROW(oracle_p_dis(0.0, 0.0), std::domain_error);
    ASSERT_EQ(oracle_p_reset(0.0, 0.0), 0.0);
}

TEST(oracle, agrees_with_closed_forms_at_random_points) {
    RandomStream rng(2026);
    for (int k = 0; k < 1000; k++) {
        double p = rng.uniform();
        double q = rng.uniform();
        ASSERT_NEAR(oracle_p_reset(p, q), p_reset_closed_form(p, q), 1e-12) << p << " " << q;
        ASSERT_NEAR(oracle_p_dis(p, q), p_dis_closed_form(p, q), 1e-12) << p << " " << q;
    }
}

TEST(oracle, small_p_limit) {
    // 0.001 / (0.001 + 0.999 * 0.2) = 0.001 / 0.2008.
    double exact = oracle_p_dis(0.001, 0.2);
    ASSERT_DOUBLE_EQ(exact, 0.001 / 0.2008);
    ASSERT_LE(std::abs(exact - 0.001 / 0.2) / exact, 0.005);
    ASSERT_NEAR(oracle_p_reset(0.001, 0.2), 0.2, 0.001);
}

TEST(oracle, reset_times_dis_is_p) {
    for (double p : {0.01, 0.1, 0.2, 0.5, 0.9, 1.0}) {
        for (double q : {0.0, 0.1, 0.25, 0.5, 1.0}) {
            OutcomeTree tree = enumerate(p, q);
            ASSERT_NEAR(oracle_p_reset(tree) * oracle_p_dis(tree), p, 1e-15);
        }
    }
}
