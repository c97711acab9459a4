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

#include "branchsim/random.h"

#include <stdexcept>

namespace branchsim {

uint64_t derive_trial_seed(uint64_t master, uint64_t index) {
    uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

size_t sample_index(std::span<const double> weights, RandomStream &rng) {
    double total = 0;
    size_t last = weights.size();
    for (size_t k = 0; k < weights.size(); k++) {
        if (weights[k] < 0) {
            throw std::invalid_argument("negative sampling weight");
        }
        total += weights[k];
        if (weights[k] > 0) {
            last = k;
        }
    }
    if (total <= 0) {
        throw std::domain_error("cannot sample from zero total weight");
    }
    double u = rng.uniform() * total;
    double cumulative = 0;
    for (size_t k = 0; k < weights.size(); k++) {
        if (weights[k] == 0) {
            continue;
        }
        cumulative += weights[k];
        if (u < cumulative) {
            return k;
        }
    }
    // Rounding in the cumulative sum can leave u just above the final bound.
    return last;
}

}  // namespace branchsim
