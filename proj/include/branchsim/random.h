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

#ifndef BRANCHSIM_RANDOM_H
#define BRANCHSIM_RANDOM_H

#include <cstdint>
#include <random>
#include <span>

namespace branchsim {

/// Per-trial seed: the (index+1)-th output of SplitMix64 started at `master`.
///
///     z = master + (index + 1) * 0x9E3779B97F4A7C15
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// All arithmetic is modulo 2^64, so the value is identical on every
/// platform. Test vectors live in tests/data/seed_vectors.txt.
uint64_t derive_trial_seed(uint64_t master, uint64_t index);

/// Deterministic random stream. The engine (mt19937_64) and the conversion
/// to doubles are both fully specified, unlike std::uniform_real_distribution.
class RandomStream {
   public:
    explicit RandomStream(uint64_t seed) : engine_(seed) {
    }

    uint64_t next_u64() {
        return engine_();
    }
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

   private:
    std::mt19937_64 engine_;
};

/// Inverse-CDF draw over nonnegative weights in index order. Indices with zero
/// weight are never returned. Throws std::domain_error if all weights are zero.
size_t sample_index(std::span<const double> weights, RandomStream &rng);

}  // namespace branchsim

#endif
