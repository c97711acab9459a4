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

#ifndef BRANCHSIM_LINALG_H
#define BRANCHSIM_LINALG_H

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace branchsim {

using Amplitude = std::complex<double>;

/// Maximum unitarity defect ‖U†U − I‖_max accepted for an evolution operator.
inline constexpr double UNITARITY_TOLERANCE = 1e-10;
/// Maximum deviation of a normalized state's squared norm from 1.
inline constexpr double NORMALIZATION_TOLERANCE = 1e-12;
/// Dense representation limit on the total Hilbert space dimension.
inline constexpr size_t MAX_TOTAL_DIM = size_t{1} << 20;

enum class RegisterRole {
    OBSERVER,
    ENVIRONMENT,
    ANCILLA,
};

struct Register {
    std::string name;
    size_t dim;
    RegisterRole role = RegisterRole::ENVIRONMENT;

    bool operator==(const Register &other) const = default;
};

/// Ordered list of registers spanning a tensor-product space.
///
/// Basis indices are row-major over the register order: the last register
/// varies fastest. At most one register may carry the OBSERVER role and, when
/// present, it must come first. An empty layout is the one-dimensional space
/// of scalars.
class SpaceLayout {
   public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<Register> registers);

    const std::vector<Register> &registers() const {
        return registers_;
    }
    size_t num_registers() const {
        return registers_.size();
    }
    size_t total_dim() const {
        return total_dim_;
    }
    bool has_observer() const {
        return !registers_.empty() && registers_.front().role == RegisterRole::OBSERVER;
    }

    /// Position of the named register; throws std::invalid_argument if absent.
    size_t position(std::string_view name) const;
    bool contains(std::string_view name) const;
    const Register &reg(std::string_view name) const;
    /// Global index step for incrementing the given register's digit by one.
    size_t stride(size_t position) const {
        return strides_[position];
    }

    std::vector<size_t> to_digits(size_t index) const;
    size_t to_index(std::span<const size_t> digits) const;
    /// The digit of one register within a global index.
    size_t digit(size_t index, size_t position) const {
        return (index / strides_[position]) % registers_[position].dim;
    }

    /// Layout of `this` followed by `other`. Names must stay unique.
    SpaceLayout concat(const SpaceLayout &other) const;
    /// Layout with the register at `position` removed.
    SpaceLayout without(size_t position) const;

    bool operator==(const SpaceLayout &other) const {
        return registers_ == other.registers_;
    }

   private:
    std::vector<Register> registers_;
    std::vector<size_t> strides_;
    size_t total_dim_ = 1;
};

/// Dense amplitude vector over a layout. Not necessarily normalized: branch
/// environment states are carried unnormalized.
class StateVector {
   public:
    StateVector(SpaceLayout layout, std::vector<Amplitude> amps);

    static StateVector basis(SpaceLayout layout, size_t index);
    static StateVector basis(SpaceLayout layout, std::span<const size_t> digits);

    const SpaceLayout &layout() const {
        return layout_;
    }
    std::span<const Amplitude> amps() const {
        return amps_;
    }
    size_t size() const {
        return amps_.size();
    }
    Amplitude operator[](size_t index) const {
        return amps_[index];
    }

    double squared_norm() const;
    double norm() const;

    bool operator==(const StateVector &other) const = default;

   private:
    SpaceLayout layout_;
    std::vector<Amplitude> amps_;
};

/// A unitary operator on a `dim`-dimensional space, stored dense row-major.
///
/// Construction validates that every entry is finite and that
/// ‖U†U − I‖_max ≤ UNITARITY_TOLERANCE, so application never re-checks.
class Operator {
   public:
    Operator(size_t dim, std::vector<Amplitude> entries);

    static Operator identity(size_t dim);
    /// Permutation operator sending basis state i to basis state perm[i].
    static Operator permutation(std::span<const size_t> perm);

    size_t dim() const {
        return dim_;
    }
    Amplitude operator()(size_t row, size_t col) const {
        return entries_[row * dim_ + col];
    }
    std::span<const Amplitude> entries() const {
        return entries_;
    }

    bool operator==(const Operator &other) const = default;

   private:
    size_t dim_;
    std::vector<Amplitude> entries_;
};

/// ‖U†U − I‖_max of a dim×dim row-major matrix. Skips zero entries, so
/// permutation-like matrices cost O(dim²) instead of O(dim³).
double unitarity_defect(size_t dim, std::span<const Amplitude> entries);
double unitarity_defect(const Operator &u);

StateVector tensor(const StateVector &a, const StateVector &b);
StateVector apply(const Operator &u, const StateVector &psi);
/// Lifts `u`, acting on `targets` (in the given order, row-major), to the
/// whole layout as u ⊗ I on the remaining registers.
Operator embed(const Operator &u, std::span<const std::string> targets, const SpaceLayout &layout);
Operator adjoint(const Operator &u);
/// The product u·v (v acts first).
Operator compose(const Operator &u, const Operator &v);
Amplitude inner(const StateVector &a, const StateVector &b);
StateVector normalize(const StateVector &psi);

namespace gates {

Operator hadamard();
Operator pauli_x();
/// Cyclic shift |k⟩ → |k+1 mod dim⟩.
Operator shift(size_t dim);

}  // namespace gates

}  // namespace branchsim

#endif
