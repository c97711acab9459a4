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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace branchsim {

namespace {

void require_probability(double x, const char *name) {
    if (!(x >= 0 && x <= 1)) {
        throw std::invalid_argument(fmt::format("{} = {} outside [0, 1]", name, x));
    }
}

void require_deutsch_registers(const SpaceLayout &layout) {
    if (!layout.contains(deutsch::MEMORY) || !layout.contains(deutsch::SPIN)) {
        throw std::invalid_argument("layout needs 'memory' and 'spin' registers");
    }
    if (layout.reg(deutsch::MEMORY).dim < 3) {
        throw std::invalid_argument("memory register needs dim >= 3 (unmeasured, saw up, saw down)");
    }
    if (layout.reg(deutsch::SPIN).dim != 2) {
        throw std::invalid_argument("spin register must have dim 2");
    }
}

std::vector<size_t> identity_permutation(size_t n) {
    std::vector<size_t> perm(n);
    for (size_t k = 0; k < n; k++) {
        perm[k] = k;
    }
    return perm;
}

void swap_pair(std::vector<size_t> &perm, size_t a, size_t b) {
    perm[a] = b;
    perm[b] = a;
}

}  // namespace

std::string_view deutsch_mode_name(DeutschMode mode) {
    switch (mode) {
        case DeutschMode::REVERSIBLE:
            return "reversible";
        case DeutschMode::ENVIRONMENT_DUMP:
            return "dump";
    }
    throw std::invalid_argument("unknown deutsch mode");
}

DeutschMode parse_deutsch_mode(std::string_view text) {
    if (text == "reversible") {
        return DeutschMode::REVERSIBLE;
    }
    if (text == "dump") {
        return DeutschMode::ENVIRONMENT_DUMP;
    }
    throw std::invalid_argument(fmt::format("unknown mode '{}'", text));
}

SpaceLayout deutsch_layout(DeutschMode mode) {
    std::vector<Register> regs{
        {deutsch::MEMORY, 3, RegisterRole::OBSERVER},
        {deutsch::SPIN, 2, RegisterRole::ENVIRONMENT},
    };
    if (mode == DeutschMode::ENVIRONMENT_DUMP) {
        regs.push_back({deutsch::RECORD, 3, RegisterRole::ANCILLA});
    }
    return SpaceLayout(std::move(regs));
}

StateVector deutsch_initial_state(const SpaceLayout &layout) {
    require_deutsch_registers(layout);
    std::vector<Amplitude> amps(layout.total_dim());
    std::vector<size_t> digits(layout.num_registers(), 0);
    size_t spin = layout.position(deutsch::SPIN);
    double s = 1 / std::sqrt(2.0);
    for (size_t v : {deutsch::UP, deutsch::DOWN}) {
        digits[spin] = v;
        amps[layout.to_index(digits)] = s;
    }
    return StateVector(layout, std::move(amps));
}

Operator build_measurement_unitary(const SpaceLayout &layout) {
    require_deutsch_registers(layout);
    size_t memory_dim = layout.reg(deutsch::MEMORY).dim;
    std::vector<size_t> perm = identity_permutation(memory_dim * 2);
    for (size_t s : {deutsch::UP, deutsch::DOWN}) {
        swap_pair(perm, deutsch::UNMEASURED * 2 + s, (deutsch::SAW_UP + s) * 2 + s);
    }
    std::vector<std::string> targets{deutsch::MEMORY, deutsch::SPIN};
    return embed(Operator::permutation(perm), targets, layout);
}

Operator build_reversal_unitary(const SpaceLayout &layout) {
    return adjoint(build_measurement_unitary(layout));
}

Operator build_dump_unitary(const SpaceLayout &layout) {
    require_deutsch_registers(layout);
    if (!layout.contains(deutsch::RECORD) || layout.reg(deutsch::RECORD).dim < 3) {
        throw std::invalid_argument("dump needs a 'record' ancilla register with dim >= 3");
    }
    size_t dm = layout.reg(deutsch::MEMORY).dim;
    size_t dr = layout.reg(deutsch::RECORD).dim;
    // Copy: record += memory (mod dr).
    std::vector<size_t> copy(dm * dr);
    for (size_t m = 0; m < dm; m++) {
        for (size_t a = 0; a < dr; a++) {
            copy[m * dr + a] = m * dr + (a + m) % dr;
        }
    }
    // Reset: controlled on the record holding a result, exchange that result
    // with "unmeasured" in memory.
    std::vector<size_t> reset = identity_permutation(dm * dr);
    for (size_t a : {deutsch::SAW_UP, deutsch::SAW_DOWN}) {
        swap_pair(reset, a * dr + a, deutsch::UNMEASURED * dr + a);
    }
    std::vector<std::string> targets{deutsch::MEMORY, deutsch::RECORD};
    Operator local = compose(Operator::permutation(reset), Operator::permutation(copy));
    return embed(local, targets, layout);
}

Schedule deutsch_schedule(const DeutschConfig &config) {
    SpaceLayout layout = deutsch_layout(config.mode);
    Schedule schedule(layout);
    schedule.apply("measure_z", build_measurement_unitary(layout));
    schedule.readout(deutsch::MEMORY, ReadoutKind::INTERMEDIATE);
    if (config.mode == DeutschMode::REVERSIBLE) {
        schedule.apply("reverse", build_reversal_unitary(layout));
    } else {
        schedule.erase("dump", build_dump_unitary(layout), deutsch::RECORD, 0);
    }
    std::vector<std::string> spin{deutsch::SPIN};
    schedule.apply("x_basis", embed(gates::hadamard(), spin, layout));
    schedule.readout(deutsch::SPIN, ReadoutKind::TERMINAL);
    return schedule;
}

DeutschResult run_deutsch(const DeutschConfig &config, Interpretation interpretation) {
    Schedule schedule = deutsch_schedule(config);
    OutcomeTree tree(schedule, deutsch_initial_state(schedule.layout()), interpretation);
    std::vector<double> dist = tree.exact_distribution(tree.num_readouts() - 1);
    return {dist[deutsch::UP], true, 0};
}

DeutschResult run_deutsch(const DeutschConfig &config, Interpretation interpretation, RandomStream &rng,
                          size_t trials) {
    if (trials == 0) {
        throw std::invalid_argument("sampled run needs at least one trial");
    }
    Schedule schedule = deutsch_schedule(config);
    OutcomeTree tree(schedule, deutsch_initial_state(schedule.layout()), interpretation);
    size_t up = 0;
    for (size_t t = 0; t < trials; t++) {
        auto readouts = tree.sample_readouts(rng);
        up += *readouts.back().outcome == deutsch::UP;
    }
    return {static_cast<double>(up) / static_cast<double>(trials), false, trials};
}

std::string_view scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::UNCORRELATED:
            return "uncorrelated";
        case Scenario::CORRELATED_BACKUP:
            return "correlated";
    }
    throw std::invalid_argument("unknown scenario");
}

Scenario parse_scenario(std::string_view text) {
    if (text == "uncorrelated") {
        return Scenario::UNCORRELATED;
    }
    if (text == "correlated" || text == "correlated_backup") {
        return Scenario::CORRELATED_BACKUP;
    }
    throw std::invalid_argument(fmt::format("unknown scenario '{}'", text));
}

std::string_view branch_group_name(BranchGroup group) {
    switch (group) {
        case BranchGroup::K1:
            return "k1";
        case BranchGroup::K2:
            return "k2";
        case BranchGroup::K3:
            return "k3";
    }
    throw std::invalid_argument("unknown branch group");
}

MacrostateRegister disaster_macrostates(const DisasterConfig &cfg) {
    require_probability(cfg.p, "p");
    require_probability(cfg.q, "q");
    auto exact_over = [&](size_t b) {
        double scaled = static_cast<double>(std::llround(cfg.q * static_cast<double>(b)));
        return scaled / static_cast<double>(b) == cfg.q;
    };
    size_t disaster_count = 1;
    size_t non_disaster;
    if (cfg.macrostate_count == 0) {
        non_disaster = MAX_MACROSTATES - 1;
        for (size_t b = 1; b < MAX_MACROSTATES; b++) {
            if (exact_over(b)) {
                non_disaster = b;
                break;
            }
        }
    } else {
        if (cfg.macrostate_count < 2) {
            throw std::invalid_argument(
                fmt::format("M = {} cannot hold a disaster and a non-disaster macrostate", cfg.macrostate_count));
        }
        if (cfg.macrostate_count > MAX_MACROSTATES) {
            throw std::invalid_argument(
                fmt::format("M = {} exceeds the dense limit of {}", cfg.macrostate_count, MAX_MACROSTATES));
        }
        non_disaster = cfg.macrostate_count - 1;
        for (size_t d = 1; d < cfg.macrostate_count; d++) {
            if (exact_over(cfg.macrostate_count - d)) {
                disaster_count = d;
                non_disaster = cfg.macrostate_count - d;
                break;
            }
        }
    }
    return MacrostateRegister::partitioned(disaster_count, non_disaster, cfg.q,
                                           {disaster::RESTORED, disaster::RESTORED_DISASTER_SECTOR});
}

SpaceLayout disaster_layout(const DisasterConfig &cfg) {
    size_t m = disaster_macrostates(cfg).count() - 2;
    return SpaceLayout({
        {disaster::OBSERVER, m + 2, RegisterRole::OBSERVER},
        {disaster::DISASTER, 2, RegisterRole::ENVIRONMENT},
        {disaster::WORKSPACE, 2, RegisterRole::ENVIRONMENT},
        {disaster::DUMP, m + 1, RegisterRole::ANCILLA},
    });
}

size_t resolved_backup_index(const DisasterConfig &cfg) {
    size_t m = disaster_macrostates(cfg).count() - 2;
    size_t j = cfg.backup_index.value_or(m - 1);
    if (j >= m) {
        throw std::invalid_argument(fmt::format("backup index {} must be below M = {}", j, m));
    }
    return j;
}

StateVector disaster_initial_state(const DisasterConfig &cfg, const SpaceLayout &layout) {
    std::vector<size_t> digits{resolved_backup_index(cfg), 0, 0, 0};
    return StateVector::basis(layout, digits);
}

namespace {

void require_disaster_layout(const DisasterConfig &cfg, const SpaceLayout &layout) {
    if (!(layout == disaster_layout(cfg))) {
        throw std::invalid_argument("layout does not match the disaster configuration");
    }
}

}  // namespace

Operator build_cycle_unitary(const DisasterConfig &cfg, const SpaceLayout &layout) {
    require_disaster_layout(cfg, layout);
    MacrostateRegister reg = disaster_macrostates(cfg);
    size_t m = reg.count() - 2;
    size_t j = resolved_backup_index(cfg);
    double qr = reg.realized_q();

    size_t counts[3] = {0, 0, 0};
    std::vector<BranchGroup> group(m);
    for (size_t k = 0; k < m; k++) {
        group[k] = reg[k].knows_disaster ? BranchGroup::K1 : reg[k].reset_scheduled ? BranchGroup::K2 : BranchGroup::K3;
        counts[static_cast<size_t>(group[k])]++;
    }
    double weights[3] = {cfg.p, (1 - cfg.p) * qr, (1 - cfg.p) * (1 - qr)};
    for (size_t g = 0; g < 3; g++) {
        if (weights[g] > 0 && counts[g] == 0) {
            throw std::invalid_argument("M is too small to realize the requested partition");
        }
    }

    auto local = [](size_t o, size_t d, size_t w) {
        return (o * 2 + d) * 2 + w;
    };
    size_t dim = (m + 2) * 2 * 2;
    std::vector<double> s(dim), t(dim);
    s[local(j, 0, 0)] = 1;
    std::vector<size_t> support{local(j, 0, 0)};
    for (size_t k = 0; k < m; k++) {
        auto g = static_cast<size_t>(group[k]);
        double a = std::sqrt(weights[g] / static_cast<double>(counts[g]));
        if (a == 0) {
            continue;
        }
        size_t d = group[k] == BranchGroup::K1 ? 1 : 0;
        t[local(k, d, 1)] = a;
        support.push_back(local(k, d, 1));
    }

    // U = I - ss' - tt' + ts' + st' exchanges s and t (s ⟂ t: different ws).
    std::vector<Amplitude> entries(dim * dim);
    for (size_t k = 0; k < dim; k++) {
        entries[k * dim + k] = 1;
    }
    for (size_t r : support) {
        for (size_t c : support) {
            entries[r * dim + c] += -s[r] * s[c] - t[r] * t[c] + t[r] * s[c] + s[r] * t[c];
        }
    }
    std::vector<std::string> targets{disaster::OBSERVER, disaster::DISASTER, disaster::WORKSPACE};
    return embed(Operator(dim, std::move(entries)), targets, layout);
}

Operator build_erasure_unitary(const DisasterConfig &cfg, const SpaceLayout &layout) {
    require_disaster_layout(cfg, layout);
    MacrostateRegister reg = disaster_macrostates(cfg);
    size_t m = reg.count() - 2;
    size_t restored = reg.index_of(disaster::RESTORED);
    size_t restored_dis = reg.index_of(disaster::RESTORED_DISASTER_SECTOR);
    size_t anc = m + 1;
    auto local = [anc](size_t o, size_t d, size_t a) {
        return (o * 2 + d) * anc + a;
    };
    std::vector<size_t> perm = identity_permutation((m + 2) * 2 * anc);
    for (size_t k = 0; k < m; k++) {
        if (!reg[k].knows_disaster && !reg[k].reset_scheduled) {
            continue;
        }
        for (size_t d = 0; d < 2; d++) {
            size_t target = (cfg.scenario == Scenario::CORRELATED_BACKUP && d == 1) ? restored_dis : restored;
            swap_pair(perm, local(k, d, 0), local(target, d, k + 1));
        }
    }
    std::vector<std::string> targets{disaster::OBSERVER, disaster::DISASTER, disaster::DUMP};
    return embed(Operator::permutation(perm), targets, layout);
}

double p_reset_closed_form(double p, double q) {
    require_probability(p, "p");
    require_probability(q, "q");
    return p + (1 - p) * q;
}

double p_dis_closed_form(double p, double q) {
    double reset = p_reset_closed_form(p, q);
    if (reset == 0) {
        throw std::domain_error("P_dis is undefined: no reset happens when p = q = 0");
    }
    return p / reset;
}

namespace {

Schedule make_disaster_schedule(const SpaceLayout &layout, std::shared_ptr<const Operator> cycle,
                                std::shared_ptr<const Operator> erasure) {
    Schedule schedule(layout);
    schedule.apply("cycle", std::move(cycle));
    schedule.readout(disaster::OBSERVER, ReadoutKind::INTERMEDIATE);
    schedule.erase("erasure", std::move(erasure), disaster::DUMP, 0);
    schedule.readout(disaster::OBSERVER, ReadoutKind::INTERMEDIATE);
    schedule.readout(disaster::DISASTER, ReadoutKind::TERMINAL);
    return schedule;
}

}  // namespace

DisasterProtocol::DisasterProtocol(DisasterConfig cfg)
    : cfg_(cfg),
      macrostates_(disaster_macrostates(cfg_)),
      layout_(disaster_layout(cfg_)),
      initial_(disaster_initial_state(cfg_, layout_)),
      cycle_(std::make_shared<const Operator>(build_cycle_unitary(cfg_, layout_))),
      erasure_(std::make_shared<const Operator>(build_erasure_unitary(cfg_, layout_))),
      schedule_(make_disaster_schedule(layout_, cycle_, erasure_)),
      mwi_tree_(schedule_, initial_, Interpretation::MANY_WORLDS),
      collapse_tree_(schedule_, initial_, Interpretation::COLLAPSE) {
}

const OutcomeTree &DisasterProtocol::tree(Interpretation interpretation) const {
    return interpretation == Interpretation::MANY_WORLDS ? mwi_tree_ : collapse_tree_;
}

BranchGroup DisasterProtocol::group_of(size_t macrostate) const {
    const Macrostate &s = macrostates_[macrostate];
    if (s.restored) {
        throw std::invalid_argument(fmt::format("macrostate '{}' is not a cycle macrostate", s.label));
    }
    return s.knows_disaster ? BranchGroup::K1 : s.reset_scheduled ? BranchGroup::K2 : BranchGroup::K3;
}

bool DisasterProtocol::is_restored(size_t macrostate) const {
    return macrostates_[macrostate].restored;
}

StateVector DisasterProtocol::post_cycle_state() const {
    return apply(*cycle_, initial_);
}

StateVector DisasterProtocol::post_erasure_state() const {
    return apply(*erasure_, post_cycle_state());
}

CycleProbabilities DisasterProtocol::exact() const {
    CycleProbabilities out{realized_q(), 0, 0, 0, 0, std::nullopt};
    BranchDecomposition cycled = decompose(post_cycle_state());
    for (const auto &b : cycled.branches) {
        switch (group_of(b.macrostate_index)) {
            case BranchGroup::K1:
                out.weight_k1 += b.weight;
                break;
            case BranchGroup::K2:
                out.weight_k2 += b.weight;
                break;
            case BranchGroup::K3:
                out.weight_k3 += b.weight;
                break;
        }
    }
    BranchDecomposition erased = decompose(post_erasure_state());
    size_t disaster_pos = erased.layout.position(disaster::DISASTER) - 1;
    double disaster_weight = 0;
    for (const auto &b : erased.branches) {
        if (!is_restored(b.macrostate_index)) {
            continue;
        }
        out.p_reset += b.weight;
        disaster_weight += marginal(b.environment_state, disaster_pos)[1];
    }
    if (out.p_reset > 0) {
        out.p_dis = disaster_weight / out.p_reset;
    }
    return out;
}

GroupConditionals DisasterProtocol::conditionals(Interpretation interpretation) const {
    double mass[2] = {0, 0};
    double hit[2] = {0, 0};
    for (const auto &path : tree(interpretation).paths()) {
        BranchGroup g = group_of(*path.outcomes[0]);
        if (g == BranchGroup::K3 || !is_restored(*path.outcomes[1])) {
            continue;
        }
        size_t slot = g == BranchGroup::K1 ? 0 : 1;
        mass[slot] += path.probability;
        if (*path.outcomes[2] == 1) {
            hit[slot] += path.probability;
        }
    }
    GroupConditionals out;
    if (mass[0] > 0) {
        out.given_k1 = hit[0] / mass[0];
    }
    if (mass[1] > 0) {
        out.given_k2 = hit[1] / mass[1];
    }
    return out;
}

CycleOutcome DisasterProtocol::outcome_from(const std::vector<ReadoutRecord> &readouts) const {
    if (readouts.size() != 3 || !readouts[0].outcome || !readouts[1].outcome || !readouts[2].outcome) {
        throw std::invalid_argument("disaster cycle trace needs three sampled readouts");
    }
    CycleOutcome out{is_restored(*readouts[1].outcome), std::nullopt, group_of(*readouts[0].outcome)};
    if (out.reset_occurred) {
        out.disaster_after_reset = *readouts[2].outcome == 1;
    }
    return out;
}

CycleOutcome DisasterProtocol::run(Interpretation interpretation, RandomStream &rng) const {
    return outcome_from(tree(interpretation).sample_readouts(rng));
}

CycleOutcome run_disaster_cycle(const DisasterConfig &cfg, Interpretation interpretation, RandomStream &rng) {
    return DisasterProtocol(cfg).run(interpretation, rng);
}

}  // namespace branchsim
