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

#ifndef BRANCHSIM_TEST_UTIL_H
#define BRANCHSIM_TEST_UTIL_H

#include <cmath>
#include <complex>
#include <vector>

#include "branchsim/linalg.h"
#include "branchsim/random.h"

namespace branchsim::testing {

inline Amplitude random_amplitude(RandomStream &rng) {
    return {2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
}

inline StateVector random_state(const SpaceLayout &layout, RandomStream &rng) {
    std::vector<Amplitude> amps(layout.total_dim());
    for (auto &a : amps) {
        a = random_amplitude(rng);
    }
    return normalize(StateVector(layout, std::move(amps)));
}

/// Haar-ish random unitary via modified Gram-Schmidt on the columns of a
/// random complex matrix.
inline Operator random_unitary(size_t dim, RandomStream &rng) {
    std::vector<std::vector<Amplitude>> cols(dim, std::vector<Amplitude>(dim));
    for (auto &c : cols) {
        for (auto &a : c) {
            a = random_amplitude(rng);
        }
    }
    for (size_t j = 0; j < dim; j++) {
        for (size_t i = 0; i < j; i++) {
            Amplitude proj{};
            for (size_t k = 0; k < dim; k++) {
                proj += std::conj(cols[i][k]) * cols[j][k];
            }
            for (size_t k = 0; k < dim; k++) {
                cols[j][k] -= proj * cols[i][k];
            }
        }
        double n = 0;
        for (const auto &a : cols[j]) {
            n += std::norm(a);
        }
        n = std::sqrt(n);
        for (auto &a : cols[j]) {
            a /= n;
        }
    }
    std::vector<Amplitude> entries(dim * dim);
    for (size_t r = 0; r < dim; r++) {
        for (size_t c = 0; c < dim; c++) {
            entries[r * dim + c] = cols[c][r];
        }
    }
    return Operator(dim, std::move(entries));
}

inline SpaceLayout qubits(std::initializer_list<const char *> names) {
    std::vector<Register> regs;
    for (const char *n : names) {
        regs.push_back({n, 2, RegisterRole::ENVIRONMENT});
    }
    return SpaceLayout(std::move(regs));
}

}  // namespace branchsim::testing

#endif
