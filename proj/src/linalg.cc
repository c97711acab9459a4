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

#include "branchsim/linalg.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace branchsim {

namespace {

bool is_finite(Amplitude a) {
    return std::isfinite(a.real()) && std::isfinite(a.imag());
}

void require_finite(std::span<const Amplitude> values, const char *what) {
    for (const auto &a : values) {
        if (!is_finite(a)) {
            throw std::invalid_argument(fmt::format("{} contains a non-finite amplitude", what));
        }
    }
}

}  // namespace

SpaceLayout::SpaceLayout(std::vector<Register> registers) : registers_(std::move(registers)) {
    std::set<std::string, std::less<>> names;
    for (size_t k = 0; k < registers_.size(); k++) {
        const auto &r = registers_[k];
        if (r.name.empty()) {
            throw std::invalid_argument("register name must not be empty");
        }
        if (!names.insert(r.name).second) {
            throw std::invalid_argument(fmt::format("duplicate register name '{}'", r.name));
        }
        if (r.dim < 2) {
            throw std::invalid_argument(fmt::format("register '{}' has dim {} < 2", r.name, r.dim));
        }
        if (r.role == RegisterRole::OBSERVER && k != 0) {
            throw std::invalid_argument(fmt::format("observer register '{}' must be the first register", r.name));
        }
        if (total_dim_ > MAX_TOTAL_DIM / r.dim) {
            throw std::invalid_argument(fmt::format("total dimension exceeds the dense limit of {}", MAX_TOTAL_DIM));
        }
        total_dim_ *= r.dim;
    }
    strides_.resize(registers_.size());
    size_t stride = 1;
    for (size_t k = registers_.size(); k-- > 0;) {
        strides_[k] = stride;
        stride *= registers_[k].dim;
    }
}

size_t SpaceLayout::position(std::string_view name) const {
    for (size_t k = 0; k < registers_.size(); k++) {
        if (registers_[k].name == name) {
            return k;
        }
    }
    throw std::invalid_argument(fmt::format("unknown register '{}'", name));
}

bool SpaceLayout::contains(std::string_view name) const {
    return std::any_of(registers_.begin(), registers_.end(), [&](const Register &r) {
        return r.name == name;
    });
}

const Register &SpaceLayout::reg(std::string_view name) const {
    return registers_[position(name)];
}

std::vector<size_t> SpaceLayout::to_digits(size_t index) const {
    if (index >= total_dim_) {
        throw std::out_of_range(fmt::format("basis index {} >= total dim {}", index, total_dim_));
    }
    std::vector<size_t> digits(registers_.size());
    for (size_t k = 0; k < registers_.size(); k++) {
        digits[k] = digit(index, k);
    }
    return digits;
}

size_t SpaceLayout::to_index(std::span<const size_t> digits) const {
    if (digits.size() != registers_.size()) {
        throw std::invalid_argument(fmt::format("expected {} digits, got {}", registers_.size(), digits.size()));
    }
    size_t index = 0;
    for (size_t k = 0; k < registers_.size(); k++) {
        if (digits[k] >= registers_[k].dim) {
            throw std::out_of_range(
                fmt::format("digit {} out of range for register '{}'", digits[k], registers_[k].name));
        }
        index += digits[k] * strides_[k];
    }
    return index;
}

SpaceLayout SpaceLayout::concat(const SpaceLayout &other) const {
    std::vector<Register> all = registers_;
    all.insert(all.end(), other.registers_.begin(), other.registers_.end());
    return SpaceLayout(std::move(all));
}

SpaceLayout SpaceLayout::without(size_t position) const {
    std::vector<Register> rest = registers_;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(position));
    return SpaceLayout(std::move(rest));
}

StateVector::StateVector(SpaceLayout layout, std::vector<Amplitude> amps)
    : layout_(std::move(layout)), amps_(std::move(amps)) {
    if (amps_.size() != layout_.total_dim()) {
        throw std::invalid_argument(
            fmt::format("state has {} amplitudes but layout dimension is {}", amps_.size(), layout_.total_dim()));
    }
    require_finite(amps_, "state vector");
}

StateVector StateVector::basis(SpaceLayout layout, size_t index) {
    if (index >= layout.total_dim()) {
        throw std::out_of_range(fmt::format("basis index {} >= total dim {}", index, layout.total_dim()));
    }
    std::vector<Amplitude> amps(layout.total_dim());
    amps[index] = 1;
    return StateVector(std::move(layout), std::move(amps));
}

StateVector StateVector::basis(SpaceLayout layout, std::span<const size_t> digits) {
    size_t index = layout.to_index(digits);
    return basis(std::move(layout), index);
}

double StateVector::squared_norm() const {
    double total = 0;
    for (const auto &a : amps_) {
        total += std::norm(a);
    }
    return total;
}

double StateVector::norm() const {
    return std::sqrt(squared_norm());
}

double unitarity_defect(size_t dim, std::span<const Amplitude> entries) {
    if (entries.size() != dim * dim) {
        throw std::invalid_argument("matrix entry count does not match dim*dim");
    }
    // Gram matrix G = U†U accumulated row by row from the nonzeros of U.
    std::vector<Amplitude> gram(dim * dim);
    std::vector<size_t> nonzero;
    for (size_t r = 0; r < dim; r++) {
        nonzero.clear();
        for (size_t c = 0; c < dim; c++) {
            if (entries[r * dim + c] != Amplitude{}) {
                nonzero.push_back(c);
            }
        }
        for (size_t i : nonzero) {
            Amplitude left = std::conj(entries[r * dim + i]);
            for (size_t j : nonzero) {
                gram[i * dim + j] += left * entries[r * dim + j];
            }
        }
    }
    double defect = 0;
    for (size_t i = 0; i < dim; i++) {
        for (size_t j = 0; j < dim; j++) {
            Amplitude expected = i == j ? 1.0 : 0.0;
            defect = std::max(defect, std::abs(gram[i * dim + j] - expected));
        }
    }
    return defect;
}

double unitarity_defect(const Operator &u) {
    return unitarity_defect(u.dim(), u.entries());
}

Operator::Operator(size_t dim, std::vector<Amplitude> entries) : dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0) {
        throw std::invalid_argument("operator dimension must be positive");
    }
    if (dim_ > MAX_TOTAL_DIM) {
        throw std::invalid_argument(fmt::format("operator dimension exceeds {}", MAX_TOTAL_DIM));
    }
    if (entries_.size() != dim_ * dim_) {
        throw std::invalid_argument(
            fmt::format("operator of dim {} needs {} entries, got {}", dim_, dim_ * dim_, entries_.size()));
    }
    require_finite(entries_, "operator");
    double defect = unitarity_defect(dim_, entries_);
    if (defect > UNITARITY_TOLERANCE) {
        throw std::invalid_argument(fmt::format("operator is not unitary: |U'U - I|_max = {:g}", defect));
    }
}

Operator Operator::identity(size_t dim) {
    std::vector<Amplitude> entries(dim * dim);
    for (size_t k = 0; k < dim; k++) {
        entries[k * dim + k] = 1;
    }
    return Operator(dim, std::move(entries));
}

Operator Operator::permutation(std::span<const size_t> perm) {
    size_t dim = perm.size();
    std::vector<Amplitude> entries(dim * dim);
    std::vector<bool> seen(dim);
    for (size_t src = 0; src < dim; src++) {
        size_t dst = perm[src];
        if (dst >= dim || seen[dst]) {
            throw std::invalid_argument("not a permutation");
        }
        seen[dst] = true;
        entries[dst * dim + src] = 1;
    }
    return Operator(dim, std::move(entries));
}

StateVector tensor(const StateVector &a, const StateVector &b) {
    SpaceLayout layout = a.layout().concat(b.layout());
    std::vector<Amplitude> amps;
    amps.reserve(a.size() * b.size());
    for (const auto &x : a.amps()) {
        for (const auto &y : b.amps()) {
            amps.push_back(x * y);
        }
    }
    return StateVector(std::move(layout), std::move(amps));
}

StateVector apply(const Operator &u, const StateVector &psi) {
    size_t n = u.dim();
    if (n != psi.size()) {
        throw std::invalid_argument(fmt::format("operator dim {} does not match state dim {}", n, psi.size()));
    }
    std::vector<Amplitude> out(n);
    auto in = psi.amps();
    auto m = u.entries();
    for (size_t r = 0; r < n; r++) {
        Amplitude acc{};
        const Amplitude *row = m.data() + r * n;
        for (size_t c = 0; c < n; c++) {
            acc += row[c] * in[c];
        }
        out[r] = acc;
    }
    return StateVector(psi.layout(), std::move(out));
}

Operator embed(const Operator &u, std::span<const std::string> targets, const SpaceLayout &layout) {
    std::vector<size_t> positions;
    size_t local_dim = 1;
    for (const auto &name : targets) {
        size_t p = layout.position(name);
        if (std::find(positions.begin(), positions.end(), p) != positions.end()) {
            throw std::invalid_argument(fmt::format("register '{}' targeted twice", name));
        }
        positions.push_back(p);
        local_dim *= layout.registers()[p].dim;
    }
    if (local_dim != u.dim()) {
        throw std::invalid_argument(
            fmt::format("operator dim {} does not match target dimension {}", u.dim(), local_dim));
    }

    // Global offset contributed by each local basis index.
    std::vector<size_t> local_offset(local_dim);
    for (size_t l = 0; l < local_dim; l++) {
        size_t rem = l;
        size_t offset = 0;
        for (size_t k = positions.size(); k-- > 0;) {
            size_t d = layout.registers()[positions[k]].dim;
            offset += (rem % d) * layout.stride(positions[k]);
            rem /= d;
        }
        local_offset[l] = offset;
    }

    size_t n = layout.total_dim();
    std::vector<Amplitude> entries(n * n);
    for (size_t col = 0; col < n; col++) {
        size_t l_col = 0;
        size_t base = col;
        for (size_t k = 0; k < positions.size(); k++) {
            size_t d = layout.digit(col, positions[k]);
            l_col = l_col * layout.registers()[positions[k]].dim + d;
            base -= d * layout.stride(positions[k]);
        }
        for (size_t l_row = 0; l_row < local_dim; l_row++) {
            entries[(base + local_offset[l_row]) * n + col] = u(l_row, l_col);
        }
    }
    return Operator(n, std::move(entries));
}

Operator adjoint(const Operator &u) {
    size_t n = u.dim();
    std::vector<Amplitude> entries(n * n);
    for (size_t r = 0; r < n; r++) {
        for (size_t c = 0; c < n; c++) {
            entries[c * n + r] = std::conj(u(r, c));
        }
    }
    return Operator(n, std::move(entries));
}

Operator compose(const Operator &u, const Operator &v) {
    if (u.dim() != v.dim()) {
        throw std::invalid_argument(fmt::format("cannot compose dims {} and {}", u.dim(), v.dim()));
    }
    size_t n = u.dim();
    std::vector<Amplitude> entries(n * n);
    for (size_t r = 0; r < n; r++) {
        for (size_t k = 0; k < n; k++) {
            Amplitude a = u(r, k);
            if (a == Amplitude{}) {
                continue;
            }
            for (size_t c = 0; c < n; c++) {
                entries[r * n + c] += a * v(k, c);
            }
        }
    }
    return Operator(n, std::move(entries));
}

Amplitude inner(const StateVector &a, const StateVector &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(fmt::format("inner product of dims {} and {}", a.size(), b.size()));
    }
    Amplitude total{};
    for (size_t k = 0; k < a.size(); k++) {
        total += std::conj(a[k]) * b[k];
    }
    return total;
}

StateVector normalize(const StateVector &psi) {
    double n = psi.norm();
    if (n == 0) {
        throw std::domain_error("cannot normalize a zero vector (empty branch)");
    }
    std::vector<Amplitude> amps(psi.amps().begin(), psi.amps().end());
    for (auto &a : amps) {
        a /= n;
    }
    return StateVector(psi.layout(), std::move(amps));
}

namespace gates {

Operator hadamard() {
    double s = 1 / std::sqrt(2.0);
    return Operator(2, {s, s, s, -s});
}

Operator pauli_x() {
    return Operator(2, {0, 1, 1, 0});
}

Operator shift(size_t dim) {
    std::vector<size_t> perm(dim);
    for (size_t k = 0; k < dim; k++) {
        perm[k] = (k + 1) % dim;
    }
    return Operator::permutation(perm);
}

}  // namespace gates

}  // namespace branchsim
