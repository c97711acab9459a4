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

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace branchsim::classical {

namespace {

void require_unit_interval(const Rational &x, const char *name) {
    if (x < 0 || x > 1) {
        throw std::invalid_argument(fmt::format("{} = {} outside [0, 1]", name, x.convert_to<double>()));
    }
}

void require_unit_interval(double x, const char *name) {
    if (!(x >= 0 && x <= 1)) {
        throw std::invalid_argument(fmt::format("{} = {} outside [0, 1]", name, x));
    }
}

constexpr PostReset post_reset_of(Path path) {
    switch (path) {
        case Path::DISASTER_RESET:
            return PostReset::DISASTER;
        case Path::PSEUDO_RANDOM_RESET:
            return PostReset::NO_DISASTER;
        case Path::NO_RESET:
            return PostReset::NOT_RESET;
    }
    return PostReset::NOT_RESET;
}

}  // namespace

std::string_view path_label(Path path) {
    switch (path) {
        case Path::DISASTER_RESET:
            return "k1";
        case Path::PSEUDO_RANDOM_RESET:
            return "k2";
        case Path::NO_RESET:
            return "k3";
    }
    throw std::invalid_argument("unknown path");
}

double OutcomeTree::total_probability() const {
    double total = 0;
    for (const auto &leaf : leaves) {
        total += leaf.probability;
    }
    return total;
}

std::optional<Rational> as_small_ratio(double x, uint64_t max_denominator) {
    if (!std::isfinite(x) || x < 0) {
        return std::nullopt;
    }
    // Continued-fraction convergents h/k of x.
    uint64_t h_prev = 1, h_prev2 = 0;
    uint64_t k_prev = 0, k_prev2 = 1;
    double y = x;
    for (int iter = 0; iter < 64; iter++) {
        double a_floor = std::floor(y);
        if (a_floor > static_cast<double>(max_denominator) * 4) {
            return std::nullopt;
        }
        auto a = static_cast<uint64_t>(a_floor);
        uint64_t h = a * h_prev + h_prev2;
        uint64_t k = a * k_prev + k_prev2;
        if (k > max_denominator) {
            return std::nullopt;
        }
        if (static_cast<double>(h) / static_cast<double>(k) == x) {
            return Rational(h, k);
        }
        double frac = y - a_floor;
        if (frac == 0) {
            return std::nullopt;
        }
        y = 1 / frac;
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
    }
    return std::nullopt;
}

OutcomeTree enumerate(const Rational &p, const Rational &q) {
    require_unit_interval(p, "p");
    require_unit_interval(q, "q");
    const Rational masses[3] = {p, (1 - p) * q, (1 - p) * (1 - q)};
    const Path paths[3] = {Path::DISASTER_RESET, Path::PSEUDO_RANDOM_RESET, Path::NO_RESET};

    OutcomeTree tree;
    tree.exact = true;
    Rational reset = 0;
    Rational reset_disaster = 0;
    for (size_t k = 0; k < 3; k++) {
        if (masses[k] == 0) {
            continue;
        }
        PostReset post = post_reset_of(paths[k]);
        tree.leaves.push_back({paths[k], post, masses[k].convert_to<double>(), masses[k]});
        if (post != PostReset::NOT_RESET) {
            reset += masses[k];
        }
        if (post == PostReset::DISASTER) {
            reset_disaster += masses[k];
        }
    }
    tree.exact_reset_mass = reset;
    tree.exact_reset_disaster_mass = reset_disaster;
    return tree;
}

OutcomeTree enumerate(double p, double q) {
    require_unit_interval(p, "p");
    require_unit_interval(q, "q");
    auto pr = as_small_ratio(p);
    auto qr = as_small_ratio(q);
    if (pr && qr) {
        return enumerate(*pr, *qr);
    }
    const double masses[3] = {p, (1 - p) * q, (1 - p) * (1 - q)};
    const Path paths[3] = {Path::DISASTER_RESET, Path::PSEUDO_RANDOM_RESET, Path::NO_RESET};
    OutcomeTree tree;
    for (size_t k = 0; k < 3; k++) {
        if (masses[k] == 0) {
            continue;
        }
        tree.leaves.push_back({paths[k], post_reset_of(paths[k]), masses[k], std::nullopt});
    }
    return tree;
}

double oracle_p_reset(const OutcomeTree &tree) {
    if (tree.exact_reset_mass) {
        return tree.exact_reset_mass->convert_to<double>();
    }
    double reset = 0;
    for (const auto &leaf : tree.leaves) {
        if (leaf.post_reset != PostReset::NOT_RESET) {
            reset += leaf.probability;
        }
    }
    return reset;
}

double oracle_p_dis(const OutcomeTree &tree) {
    if (tree.exact_reset_mass) {
        if (*tree.exact_reset_mass == 0) {
            throw std::domain_error("P(disaster | reset) is undefined: the reset subtree is empty");
        }
        Rational conditional = *tree.exact_reset_disaster_mass / *tree.exact_reset_mass;
        return conditional.convert_to<double>();
    }
    double reset = 0;
    double disaster = 0;
    for (const auto &leaf : tree.leaves) {
        if (leaf.post_reset == PostReset::NOT_RESET) {
            continue;
        }
        reset += leaf.probability;
        if (leaf.post_reset == PostReset::DISASTER) {
            disaster += leaf.probability;
        }
    }
    if (reset == 0) {
        throw std::domain_error("P(disaster | reset) is undefined: the reset subtree is empty");
    }
    return disaster / reset;
}

double oracle_p_reset(double p, double q) {
    return oracle_p_reset(enumerate(p, q));
}

double oracle_p_dis(double p, double q) {
    return oracle_p_dis(enumerate(p, q));
}

}  // namespace branchsim::classical
