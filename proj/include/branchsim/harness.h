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

#ifndef BRANCHSIM_HARNESS_H
#define BRANCHSIM_HARNESS_H

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "branchsim/config.h"
#include "branchsim/interpretations.h"
#include "branchsim/protocols.h"

namespace branchsim {

/// Two-sided 95% normal quantile.
inline constexpr double Z_95 = 1.959963984540054;

struct WilsonInterval {
    double low;
    double high;

    bool contains(double x) const {
        return low <= x && x <= high;
    }
};

/// Wilson score interval for `successes` out of `n` (n > 0).
WilsonInterval wilson_interval(uint64_t successes, uint64_t n, double z = Z_95);

/// Evaluates f(i) for i in [0, n) on up to `threads` workers (0 means the
/// hardware concurrency) and returns the results ordered by i.
template <class R, class F>
std::vector<R> run_indexed(uint64_t n, size_t threads, F f) {
    std::vector<R> results(n);
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<size_t>(std::min<uint64_t>(threads, std::max<uint64_t>(n, 1)));
    if (threads <= 1) {
        for (uint64_t i = 0; i < n; i++) {
            results[i] = f(i);
        }
        return results;
    }
    std::vector<std::thread> workers;
    uint64_t chunk = (n + threads - 1) / threads;
    for (size_t w = 0; w < threads; w++) {
        uint64_t begin = w * chunk;
        uint64_t end = std::min(n, begin + chunk);
        workers.emplace_back([&results, &f, begin, end] {
            for (uint64_t i = begin; i < end; i++) {
                results[i] = f(i);
            }
        });
    }
    for (auto &t : workers) {
        t.join();
    }
    return results;
}

struct TrialRecord {
    uint64_t trial_index = 0;
    uint64_t seed = 0;
    Interpretation interpretation = Interpretation::MANY_WORLDS;
    Scenario scenario = Scenario::UNCORRELATED;
    double p = 0;
    double q = 0;
    CycleOutcome outcome{};
};

struct DeutschTrialRecord {
    uint64_t trial_index = 0;
    uint64_t seed = 0;
    Interpretation interpretation = Interpretation::MANY_WORLDS;
    DeutschMode mode = DeutschMode::REVERSIBLE;
    std::optional<size_t> memory_readout;
    bool x_up = false;
};

/// Trial i uses RandomStream(derive_trial_seed(seed, i)). `p` and `q` are
/// the requested values recorded in the CSV.
std::vector<TrialRecord> run_disaster_trials(const DisasterProtocol &protocol, Interpretation interpretation,
                                             uint64_t trials, uint64_t seed, size_t threads, double p, double q);
std::vector<DeutschTrialRecord> run_deutsch_trials(const DeutschConfig &config, Interpretation interpretation,
                                                   uint64_t trials, uint64_t seed, size_t threads);

/// Header: trial,seed,interpretation,scenario,p,q,branch_group,reset,disaster_after_reset
void write_disaster_csv(std::ostream &out, std::span<const TrialRecord> records);
/// Header: trial,seed,interpretation,mode,memory_readout,x_up
void write_deutsch_csv(std::ostream &out, std::span<const DeutschTrialRecord> records);

/// Counts reduced in trial order.
struct DisasterCounts {
    uint64_t trials = 0;
    uint64_t resets = 0;
    uint64_t disasters_after_reset = 0;
    uint64_t k1_resets = 0;
    uint64_t k1_disasters = 0;
    uint64_t k2_resets = 0;
    uint64_t k2_disasters = 0;
};

DisasterCounts count_outcomes(std::span<const TrialRecord> records);

struct SummaryRow {
    std::string metric;
    std::string interpretation;
    std::optional<double> estimate;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::optional<double> exact;
    std::optional<double> reference;
    /// Deterministic check result; absent for other rows.
    std::optional<bool> pass;
    /// Whether the Wilson interval contains the exact value. Reported but not
    /// a check: about one interval in twenty misses by chance.
    std::optional<bool> covers;
};

struct Report {
    std::string title;
    std::vector<std::string> notes;
    std::vector<SummaryRow> rows;

    bool all_pass() const;
};

void print_report(std::ostream &out, const Report &report);
/// Header: metric,interpretation,estimate,ci_low,ci_high,exact,reference,pass,covers
void write_summary_csv(std::ostream &out, const Report &report);

struct SweepRow {
    double p;
    double q;
    double realized_q;
    size_t macrostates;
    double closed_p_reset;
    double quantum_p_reset;
    double oracle_p_reset;
    std::optional<double> closed_p_dis;
    std::optional<double> quantum_p_dis;
    std::optional<double> oracle_p_dis;
    /// p/q, the small-p approximation of P_dis.
    std::optional<double> limit_p_dis;
    uint64_t mc_trials;
    double mc_p_reset;
    WilsonInterval mc_p_reset_ci;
    std::optional<double> mc_p_dis;
    std::optional<WilsonInterval> mc_p_dis_ci;
    /// |quantum - oracle| <= 1e-10 for both quantities.
    bool agree;
};

std::vector<SweepRow> sweep(std::span<const double> p_list, std::span<const double> q_list,
                            const ExperimentConfig &cfg);
/// Header: p,q,realized_q,macrostates,closed_p_reset,quantum_p_reset,oracle_p_reset,
/// closed_p_dis,quantum_p_dis,oracle_p_dis,limit_p_dis,mc_trials,mc_p_reset,
/// mc_p_reset_low,mc_p_reset_high,mc_p_dis,mc_p_dis_low,mc_p_dis_high,agree
void write_sweep_csv(std::ostream &out, std::span<const SweepRow> rows);

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

/// The standard invariant grid and interpretation discriminators.
std::vector<CheckResult> verify(const ExperimentConfig &cfg);

/// Runs one experiment, writing human-readable output to `out`. Returns the
/// process exit code: 0 if every enabled check passed, 1 otherwise. Throws
/// std::runtime_error when an output file cannot be written.
int run_experiment(const ExperimentConfig &cfg, std::ostream &out);

/// Probability formatted with up to 12 decimals and at least one.
std::string format_probability(double x);

}  // namespace branchsim

#endif
