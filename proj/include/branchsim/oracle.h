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

#ifndef BRANCHSIM_ORACLE_H
#define BRANCHSIM_ORACLE_H

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace branchsim::classical {

using Rational = boost::multiprecision::cpp_rational;

/// Largest denominator for which a double input is treated as an exact ratio.
inline constexpr uint64_t MAX_EXACT_DENOMINATOR = 1'000'000;

/// Why (or whether) the observer resets in the next clock cycle.
enum class Path {
    DISASTER_RESET,       // k1
    PSEUDO_RANDOM_RESET,  // k2
    NO_RESET,             // k3
};

std::string_view path_label(Path path);

enum class PostReset {
    DISASTER,
    NO_DISASTER,
    NOT_RESET,
};

struct Leaf {
    Path path;
    PostReset post_reset;
    double probability;
    /// Present when the tree was built in rational mode.
    std::optional<Rational> exact;
};

/// Single-cycle classical probability tree. Zero-probability leaves are
/// omitted.
struct OutcomeTree {
    std::vector<Leaf> leaves;
    /// Rational arithmetic was used.
    bool exact = false;
    /// Mass of the reset subtree and its disaster part, kept exact when
    /// available.
    std::optional<Rational> exact_reset_mass;
    std::optional<Rational> exact_reset_disaster_mass;

    double total_probability() const;
};

/// Recovers x = a/b with b <= max_denominator when the double is exactly the
/// nearest double to such a ratio.
std::optional<Rational> as_small_ratio(double x, uint64_t max_denominator = MAX_EXACT_DENOMINATOR);

/// Rational mode when both p and q are small ratios, double mode otherwise.
OutcomeTree enumerate(double p, double q);
OutcomeTree enumerate(const Rational &p, const Rational &q);

/// Reset subtree mass.
double oracle_p_reset(const OutcomeTree &tree);
/// Disaster mass of the reset subtree, renormalized. Throws
/// std::domain_error when the reset subtree is empty.
double oracle_p_dis(const OutcomeTree &tree);
double oracle_p_reset(double p, double q);
double oracle_p_dis(double p, double q);

}  // namespace branchsim::classical

#endif
