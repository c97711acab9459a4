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

#include "branchsim/harness.h"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "branchsim/oracle.h"
#include "branchsim/random.h"

namespace branchsim {

namespace {

constexpr double AGREEMENT_TOLERANCE = 1e-10;
constexpr double IDENTITY_TOLERANCE = 1e-12;

std::string csv_number(const std::optional<double> &x) {
    return x ? fmt::format("{}", *x) : std::string();
}

std::string text_number(const std::optional<double> &x) {
    return x ? fmt::format("{:.6g}", *x) : std::string("-");
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path));
    }
    return out;
}

void finish_output(std::ofstream &out, const std::string &path) {
    out.flush();
    if (!out) {
        throw std::runtime_error(fmt::format("error while writing '{}'", path));
    }
}

std::optional<double> ratio(uint64_t num, uint64_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

/// A row comparing two exact values, with an optional deterministic check.
SummaryRow exact_row(std::string metric, double exact, double reference, std::optional<bool> pass) {
    SummaryRow row;
    row.metric = std::move(metric);
    row.interpretation = "-";
    row.exact = exact;
    row.reference = reference;
    row.pass = pass;
    return row;
}

SummaryRow estimate_row(std::string metric, Interpretation interpretation, uint64_t successes, uint64_t n,
                        std::optional<double> exact, std::optional<double> reference) {
    SummaryRow row;
    row.metric = std::move(metric);
    row.interpretation = interpretation_name(interpretation);
    row.estimate = ratio(successes, n);
    row.exact = exact;
    row.reference = reference;
    if (n > 0) {
        WilsonInterval ci = wilson_interval(successes, n);
        row.ci_low = ci.low;
        row.ci_high = ci.high;
        if (exact) {
            row.covers = ci.contains(*exact);
        }
    }
    return row;
}

DisasterConfig disaster_config(const ExperimentConfig &cfg, double p, double q) {
    DisasterConfig d;
    d.p = p;
    d.q = q;
    d.scenario = cfg.scenario;
    d.macrostate_count = cfg.macrostates;
    return d;
}

Report disaster_report(const ExperimentConfig &cfg, std::vector<TrialRecord> &all_records) {
    double p = cfg.p.front();
    double q = cfg.q.front();
    DisasterProtocol protocol(disaster_config(cfg, p, q));
    CycleProbabilities exact = protocol.exact();
    double qr = exact.realized_q;

    Report report;
    report.title = fmt::format("disaster cycle: p = {}, q = {}, scenario = {}, trials = {}, seed = {}", p, q,
                               scenario_name(cfg.scenario), cfg.trials, cfg.seed);
    report.notes.push_back(
        fmt::format("realized q = {} with M = {} cycle macrostates", qr, protocol.macrostates().count() - 2));

    std::optional<double> closed_dis;
    if (p_reset_closed_form(p, q) > 0) {
        closed_dis = p_dis_closed_form(p, q);
    }
    report.rows.push_back(exact_row("realized_q", qr, q, std::nullopt));

    double oracle_reset = classical::oracle_p_reset(p, qr);
    double closed_reset_realized = p_reset_closed_form(p, qr);
    report.rows.push_back(exact_row("P_reset quantum vs closed form", exact.p_reset, closed_reset_realized,
                                    std::abs(exact.p_reset - closed_reset_realized) <= AGREEMENT_TOLERANCE));
    report.rows.push_back(exact_row("P_reset quantum vs oracle", exact.p_reset, oracle_reset,
                                    std::abs(exact.p_reset - oracle_reset) <= AGREEMENT_TOLERANCE));
    if (exact.p_dis) {
        double oracle_dis = classical::oracle_p_dis(p, qr);
        double closed_dis_realized = p_dis_closed_form(p, qr);
        report.rows.push_back(exact_row("P_dis quantum vs closed form", *exact.p_dis, closed_dis_realized,
                                        std::abs(*exact.p_dis - closed_dis_realized) <= AGREEMENT_TOLERANCE));
        report.rows.push_back(exact_row("P_dis quantum vs oracle", *exact.p_dis, oracle_dis,
                                        std::abs(*exact.p_dis - oracle_dis) <= AGREEMENT_TOLERANCE));
        double product = exact.p_reset * *exact.p_dis;
        report.rows.push_back(exact_row("P_reset * P_dis", product, p, std::abs(product - p) <= IDENTITY_TOLERANCE));
    }

    for (Interpretation interpretation : expand(cfg.interpretation)) {
        auto records = run_disaster_trials(protocol, interpretation, cfg.trials, cfg.seed, cfg.threads, p, q);
        DisasterCounts c = count_outcomes(records);
        GroupConditionals cond = protocol.conditionals(interpretation);
        report.rows.push_back(
            estimate_row("P_reset", interpretation, c.resets, c.trials, exact.p_reset, p_reset_closed_form(p, q)));
        report.rows.push_back(
            estimate_row("P_dis", interpretation, c.disasters_after_reset, c.resets, exact.p_dis, closed_dis));
        report.rows.push_back(
            estimate_row("P_dis | k1", interpretation, c.k1_disasters, c.k1_resets, cond.given_k1, std::nullopt));
        report.rows.push_back(
            estimate_row("P_dis | k2", interpretation, c.k2_disasters, c.k2_resets, cond.given_k2, std::nullopt));
        all_records.insert(all_records.end(), records.begin(), records.end());
    }
    return report;
}

Report deutsch_report(const ExperimentConfig &cfg, std::vector<DeutschTrialRecord> &all_records) {
    DeutschConfig dc{cfg.mode};
    Report report;
    report.title =
        fmt::format("deutsch: mode = {}, trials = {}, seed = {}", deutsch_mode_name(cfg.mode), cfg.trials, cfg.seed);
    for (Interpretation interpretation : expand(cfg.interpretation)) {
        DeutschResult exact = run_deutsch(dc, interpretation);
        report.notes.push_back(fmt::format("[{}] P(x-up) = {} (exact)", interpretation_name(interpretation),
                                           format_probability(exact.p_x_up)));
        auto records = run_deutsch_trials(dc, interpretation, cfg.trials, cfg.seed, cfg.threads);
        uint64_t up = 0;
        for (const auto &r : records) {
            up += r.x_up;
        }
        report.rows.push_back(estimate_row("P(x-up)", interpretation, up, records.size(), exact.p_x_up, std::nullopt));
        all_records.insert(all_records.end(), records.begin(), records.end());
    }
    return report;
}

void write_report_files(const ExperimentConfig &cfg, const Report &report) {
    std::string path = *cfg.out + ".summary.csv";
    auto out = open_output(path);
    write_summary_csv(out, report);
    finish_output(out, path);
}

}  // namespace

WilsonInterval wilson_interval(uint64_t successes, uint64_t n, double z) {
    if (n == 0) {
        throw std::invalid_argument("wilson interval needs n > 0");
    }
    if (successes > n) {
        throw std::invalid_argument("more successes than trials");
    }
    double nn = static_cast<double>(n);
    double phat = static_cast<double>(successes) / nn;
    double z2 = z * z;
    double denom = 1 + z2 / nn;
    double center = (phat + z2 / (2 * nn)) / denom;
    double half = z / denom * std::sqrt(phat * (1 - phat) / nn + z2 / (4 * nn * nn));
    // The bounds are exactly 0 and 1 at the extremes; rounding would
    // otherwise exclude an exact probability of 0 or 1.
    double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
    double high = successes == n ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

std::vector<TrialRecord> run_disaster_trials(const DisasterProtocol &protocol, Interpretation interpretation,
                                             uint64_t trials, uint64_t seed, size_t threads, double p, double q) {
    return run_indexed<TrialRecord>(trials, threads, [&](uint64_t i) {
        uint64_t trial_seed = derive_trial_seed(seed, i);
        RandomStream rng(trial_seed);
        return TrialRecord{
            i, trial_seed, interpretation, protocol.config().scenario, p, q, protocol.run(interpretation, rng)};
    });
}

std::vector<DeutschTrialRecord> run_deutsch_trials(const DeutschConfig &config, Interpretation interpretation,
                                                   uint64_t trials, uint64_t seed, size_t threads) {
    Schedule schedule = deutsch_schedule(config);
    OutcomeTree tree(schedule, deutsch_initial_state(schedule.layout()), interpretation);
    return run_indexed<DeutschTrialRecord>(trials, threads, [&](uint64_t i) {
        uint64_t trial_seed = derive_trial_seed(seed, i);
        RandomStream rng(trial_seed);
        auto readouts = tree.sample_readouts(rng);
        return DeutschTrialRecord{i,
                                  trial_seed,
                                  interpretation,
                                  config.mode,
                                  readouts.front().outcome,
                                  *readouts.back().outcome == deutsch::UP};
    });
}

void write_disaster_csv(std::ostream &out, std::span<const TrialRecord> records) {
    out << "trial,seed,interpretation,scenario,p,q,branch_group,reset,disaster_after_reset\n";
    for (const auto &r : records) {
        std::string dis;
        if (r.outcome.disaster_after_reset) {
            dis = *r.outcome.disaster_after_reset ? "1" : "0";
        }
        fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", r.trial_index, r.seed, interpretation_name(r.interpretation),
                   scenario_name(r.scenario), r.p, r.q, branch_group_name(r.outcome.branch_group),
                   r.outcome.reset_occurred ? 1 : 0, dis);
    }
}

void write_deutsch_csv(std::ostream &out, std::span<const DeutschTrialRecord> records) {
    out << "trial,seed,interpretation,mode,memory_readout,x_up\n";
    for (const auto &r : records) {
        std::string memory;
        if (r.memory_readout) {
            memory = *r.memory_readout == deutsch::SAW_UP     ? "saw_up"
                     : *r.memory_readout == deutsch::SAW_DOWN ? "saw_down"
                                                              : "unmeasured";
        }
        fmt::print(out, "{},{},{},{},{},{}\n", r.trial_index, r.seed, interpretation_name(r.interpretation),
                   deutsch_mode_name(r.mode), memory, r.x_up ? 1 : 0);
    }
}

DisasterCounts count_outcomes(std::span<const TrialRecord> records) {
    DisasterCounts c;
    for (const auto &r : records) {
        c.trials++;
        if (!r.outcome.reset_occurred) {
            continue;
        }
        bool dis = r.outcome.disaster_after_reset.value_or(false);
        c.resets++;
        c.disasters_after_reset += dis;
        if (r.outcome.branch_group == BranchGroup::K1) {
            c.k1_resets++;
            c.k1_disasters += dis;
        } else if (r.outcome.branch_group == BranchGroup::K2) {
            c.k2_resets++;
            c.k2_disasters += dis;
        }
    }
    return c;
}

bool Report::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const SummaryRow &r) {
        return r.pass.value_or(true);
    });
}

void print_report(std::ostream &out, const Report &report) {
    fmt::print(out, "{}\n", report.title);
    for (const auto &note : report.notes) {
        fmt::print(out, "  {}\n", note);
    }
    fmt::print(out, "{:<32} {:<9} {:>12} {:>25} {:>12} {:>12} {:>6} {:>7}\n", "metric", "interp", "estimate",
               "95% Wilson interval", "exact", "reference", "check", "covers");
    for (const auto &r : report.rows) {
        std::string ci = r.ci_low ? fmt::format("[{:.6f}, {:.6f}]", *r.ci_low, *r.ci_high) : std::string("-");
        std::string check = r.pass ? (*r.pass ? "PASS" : "FAIL") : "-";
        std::string covers = r.covers ? (*r.covers ? "yes" : "no") : "-";
        fmt::print(out, "{:<32} {:<9} {:>12} {:>25} {:>12} {:>12} {:>6} {:>7}\n", r.metric, r.interpretation,
                   text_number(r.estimate), ci, text_number(r.exact), text_number(r.reference), check, covers);
    }
}

void write_summary_csv(std::ostream &out, const Report &report) {
    out << "metric,interpretation,estimate,ci_low,ci_high,exact,reference,pass,covers\n";
    auto flag = [](std::optional<bool> b) {
        return b ? (*b ? "1" : "0") : "";
    };
    for (const auto &r : report.rows) {
        fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", r.metric, r.interpretation, csv_number(r.estimate),
                   csv_number(r.ci_low), csv_number(r.ci_high), csv_number(r.exact), csv_number(r.reference),
                   flag(r.pass), flag(r.covers));
    }
}

std::vector<SweepRow> sweep(std::span<const double> p_list, std::span<const double> q_list,
                            const ExperimentConfig &cfg) {
    if (p_list.empty() || q_list.empty()) {
        throw std::invalid_argument("sweep needs non-empty p and q lists");
    }
    Interpretation interpretation = expand(cfg.interpretation).front();
    std::vector<SweepRow> rows;
    uint64_t cell = 0;
    for (double p : p_list) {
        for (double q : q_list) {
            DisasterProtocol protocol(disaster_config(cfg, p, q));
            CycleProbabilities exact = protocol.exact();
            double qr = exact.realized_q;
            SweepRow row{};
            row.p = p;
            row.q = q;
            row.realized_q = qr;
            row.macrostates = protocol.macrostates().count() - 2;
            row.closed_p_reset = p_reset_closed_form(p, q);
            row.quantum_p_reset = exact.p_reset;
            row.oracle_p_reset = classical::oracle_p_reset(p, qr);
            row.agree = std::abs(row.quantum_p_reset - row.oracle_p_reset) <= AGREEMENT_TOLERANCE;
            if (row.closed_p_reset > 0) {
                row.closed_p_dis = p_dis_closed_form(p, q);
            }
            row.quantum_p_dis = exact.p_dis;
            if (p_reset_closed_form(p, qr) > 0) {
                row.oracle_p_dis = classical::oracle_p_dis(p, qr);
            }
            if (row.quantum_p_dis.has_value() != row.oracle_p_dis.has_value()) {
                row.agree = false;
            } else if (row.quantum_p_dis) {
                row.agree = row.agree && std::abs(*row.quantum_p_dis - *row.oracle_p_dis) <= AGREEMENT_TOLERANCE;
            }
            if (q > 0) {
                row.limit_p_dis = p / q;
            }
            uint64_t cell_seed = derive_trial_seed(cfg.seed, cell++);
            auto records = run_disaster_trials(protocol, interpretation, cfg.trials, cell_seed, cfg.threads, p, q);
            DisasterCounts c = count_outcomes(records);
            row.mc_trials = c.trials;
            row.mc_p_reset = *ratio(c.resets, c.trials);
            row.mc_p_reset_ci = wilson_interval(c.resets, c.trials);
            row.mc_p_dis = ratio(c.disasters_after_reset, c.resets);
            if (c.resets > 0) {
                row.mc_p_dis_ci = wilson_interval(c.disasters_after_reset, c.resets);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream &out, std::span<const SweepRow> rows) {
    out << "p,q,realized_q,macrostates,closed_p_reset,quantum_p_reset,oracle_p_reset,closed_p_dis,quantum_p_dis,"
           "oracle_p_dis,limit_p_dis,mc_trials,mc_p_reset,mc_p_reset_low,mc_p_reset_high,mc_p_dis,mc_p_dis_low,"
           "mc_p_dis_high,agree\n";
    for (const auto &r : rows) {
        std::optional<double> dis_low, dis_high;
        if (r.mc_p_dis_ci) {
            dis_low = r.mc_p_dis_ci->low;
            dis_high = r.mc_p_dis_ci->high;
        }
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.p, r.q, r.realized_q,
                   r.macrostates, r.closed_p_reset, r.quantum_p_reset, r.oracle_p_reset, csv_number(r.closed_p_dis),
                   csv_number(r.quantum_p_dis), csv_number(r.oracle_p_dis), csv_number(r.limit_p_dis), r.mc_trials,
                   r.mc_p_reset, r.mc_p_reset_ci.low, r.mc_p_reset_ci.high, csv_number(r.mc_p_dis), csv_number(dis_low),
                   csv_number(dis_high), r.agree ? 1 : 0);
    }
}

std::string format_probability(double x) {
    std::string s = fmt::format("{:.12f}", x);
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') {
        s.pop_back();
    }
    return s;
}

std::vector<CheckResult> verify(const ExperimentConfig &cfg) {
    std::vector<CheckResult> checks;
    auto add = [&](std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass, std::move(detail)});
    };

    // Interpretation discriminators.
    double mwi_rev = run_deutsch({DeutschMode::REVERSIBLE}, Interpretation::MANY_WORLDS).p_x_up;
    double col_rev = run_deutsch({DeutschMode::REVERSIBLE}, Interpretation::COLLAPSE).p_x_up;
    double mwi_dump = run_deutsch({DeutschMode::ENVIRONMENT_DUMP}, Interpretation::MANY_WORLDS).p_x_up;
    double col_dump = run_deutsch({DeutschMode::ENVIRONMENT_DUMP}, Interpretation::COLLAPSE).p_x_up;
    add("deutsch reversible mwi exact P(x-up) = 1", std::abs(mwi_rev - 1) <= AGREEMENT_TOLERANCE,
        format_probability(mwi_rev));
    add("deutsch reversible collapse exact P(x-up) = 0.5", std::abs(col_rev - 0.5) <= AGREEMENT_TOLERANCE,
        format_probability(col_rev));
    add("deutsch dump exact P(x-up) = 0.5 under both",
        std::abs(mwi_dump - 0.5) <= AGREEMENT_TOLERANCE && std::abs(col_dump - 0.5) <= AGREEMENT_TOLERANCE,
        fmt::format("mwi {} collapse {}", format_probability(mwi_dump), format_probability(col_dump)));
    {
        auto records =
            run_deutsch_trials({DeutschMode::REVERSIBLE}, Interpretation::COLLAPSE, cfg.trials, cfg.seed, cfg.threads);
        uint64_t up = 0;
        for (const auto &r : records) {
            up += r.x_up;
        }
        double rate = static_cast<double>(up) / static_cast<double>(records.size());
        add("deutsch reversible collapse sampled 0.5 +- 0.02", std::abs(rate - 0.5) <= 0.02,
            fmt::format("{} over {} trials", rate, records.size()));
    }

    // Standard grid.
    const std::vector<double> grid_p{0, 0.01, 0.1, 0.2, 0.5, 0.9, 1};
    const std::vector<double> grid_q{0, 0.1, 0.25, 0.5, 1};
    double worst_agreement = 0;
    double worst_identity = 0;
    double worst_unitarity = 0;
    size_t covered = 0;
    size_t intervals = 0;
    uint64_t cell = 0;
    for (double p : grid_p) {
        for (double q : grid_q) {
            DisasterProtocol protocol(disaster_config(cfg, p, q));
            worst_unitarity = std::max({worst_unitarity, unitarity_defect(protocol.cycle_unitary()),
                                        unitarity_defect(protocol.erasure_unitary())});
            CycleProbabilities exact = protocol.exact();
            double qr = exact.realized_q;
            double closed = p_reset_closed_form(p, qr);
            double oracle = classical::oracle_p_reset(p, qr);
            worst_agreement = std::max({worst_agreement, std::abs(exact.p_reset - closed),
                                        std::abs(exact.p_reset - oracle), std::abs(closed - oracle)});
            if (closed > 0 && exact.p_dis) {
                double closed_dis = p_dis_closed_form(p, qr);
                double oracle_dis = classical::oracle_p_dis(p, qr);
                worst_agreement = std::max({worst_agreement, std::abs(*exact.p_dis - closed_dis),
                                            std::abs(*exact.p_dis - oracle_dis), std::abs(closed_dis - oracle_dis)});
                worst_identity = std::max(worst_identity, std::abs(closed * closed_dis - p));
            } else if (closed > 0 || exact.p_dis) {
                worst_agreement = std::max(worst_agreement, 1.0);
            }

            uint64_t cell_seed = derive_trial_seed(cfg.seed, cell++);
            auto records =
                run_disaster_trials(protocol, Interpretation::MANY_WORLDS, cfg.trials, cell_seed, cfg.threads, p, q);
            DisasterCounts c = count_outcomes(records);
            intervals++;
            covered += wilson_interval(c.resets, c.trials).contains(exact.p_reset);
            if (c.resets > 0 && exact.p_dis) {
                intervals++;
                covered += wilson_interval(c.disasters_after_reset, c.resets).contains(*exact.p_dis);
            }
        }
    }
    add("grid: closed form, oracle and quantum agree within 1e-10", worst_agreement <= AGREEMENT_TOLERANCE,
        fmt::format("max deviation {:g}", worst_agreement));
    add("grid: P_reset * P_dis = p within 1e-12", worst_identity <= IDENTITY_TOLERANCE,
        fmt::format("max deviation {:g}", worst_identity));
    add("grid: every built operator is unitary within 1e-10", worst_unitarity <= UNITARITY_TOLERANCE,
        fmt::format("max defect {:g}", worst_unitarity));
    double coverage = static_cast<double>(covered) / static_cast<double>(intervals);
    add("grid: Wilson 95% coverage of exact values >= 93%", coverage >= 0.93,
        fmt::format("{}/{} intervals cover", covered, intervals));

    // Oracle against closed forms at random points.
    {
        RandomStream rng(derive_trial_seed(cfg.seed, 0xC1A551C));
        double worst = 0;
        for (int k = 0; k < 1000; k++) {
            double p = rng.uniform();
            double q = rng.uniform();
            worst = std::max({worst, std::abs(classical::oracle_p_reset(p, q) - p_reset_closed_form(p, q)),
                              std::abs(classical::oracle_p_dis(p, q) - p_dis_closed_form(p, q))});
        }
        add("oracle vs closed form at 1000 random points within 1e-12", worst <= IDENTITY_TOLERANCE,
            fmt::format("max deviation {:g}", worst));
    }

    // Small-p limit.
    {
        double p = 0.001;
        double q = 0.2;
        double exact = p_dis_closed_form(p, q);
        double rel = std::abs(exact - p / q) / exact;
        add("limit p << q: |P_dis - p/q| / P_dis <= 0.005", rel <= 0.005,
            fmt::format("P_dis = {:.9f}, p/q = {}, relative gap {:.6f}", exact, p / q, rel));
    }

    // Correlated backup.
    {
        DisasterConfig d = disaster_config(cfg, 0.2, 0.5);
        d.scenario = Scenario::CORRELATED_BACKUP;
        GroupConditionals cond = DisasterProtocol(d).conditionals(Interpretation::MANY_WORLDS);
        bool pass = cond.given_k1 && cond.given_k2 && std::abs(*cond.given_k1 - 1) <= IDENTITY_TOLERANCE &&
                    std::abs(*cond.given_k2) <= IDENTITY_TOLERANCE;
        add("correlated backup: P(dis | k1) = 1 and P(dis | k2) = 0", pass,
            fmt::format("k1 {} k2 {}", cond.given_k1.value_or(NAN), cond.given_k2.value_or(NAN)));
    }

    add("derive_trial_seed(0, 0) test vector", derive_trial_seed(0, 0) == 0xE220A8397B1DCDAFULL,
        fmt::format("{:#018x}", derive_trial_seed(0, 0)));
    return checks;
}

int run_experiment(const ExperimentConfig &cfg, std::ostream &out) {
    if (cfg.out) {
        // Fail before running anything if the output cannot be created.
        open_output(*cfg.out);
    }
    switch (cfg.experiment) {
        case Experiment::DISASTER: {
            std::vector<TrialRecord> records;
            Report report = disaster_report(cfg, records);
            print_report(out, report);
            if (cfg.out) {
                auto file = open_output(*cfg.out);
                write_disaster_csv(file, records);
                finish_output(file, *cfg.out);
                write_report_files(cfg, report);
            }
            return report.all_pass() ? 0 : 1;
        }
        case Experiment::DEUTSCH: {
            std::vector<DeutschTrialRecord> records;
            Report report = deutsch_report(cfg, records);
            print_report(out, report);
            if (cfg.out) {
                auto file = open_output(*cfg.out);
                write_deutsch_csv(file, records);
                finish_output(file, *cfg.out);
                write_report_files(cfg, report);
            }
            return report.all_pass() ? 0 : 1;
        }
        case Experiment::SWEEP: {
            auto rows = sweep(cfg.p, cfg.q, cfg);
            fmt::print(out, "{:>7} {:>6} {:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>7}\n", "p", "q", "q_real",
                       "P_reset", "MC P_reset", "P_dis", "oracle P_dis", "p/q", "MC P_dis", "agree");
            bool all = true;
            for (const auto &r : rows) {
                fmt::print(out, "{:>7} {:>6} {:>8} {:>12.6g} {:>12.6g} {:>12} {:>12} {:>12} {:>12} {:>7}\n", r.p, r.q,
                           r.realized_q, r.quantum_p_reset, r.mc_p_reset, text_number(r.quantum_p_dis),
                           text_number(r.oracle_p_dis), text_number(r.limit_p_dis), text_number(r.mc_p_dis),
                           r.agree ? "yes" : "NO");
                all = all && r.agree;
            }
            if (cfg.out) {
                auto file = open_output(*cfg.out);
                write_sweep_csv(file, rows);
                finish_output(file, *cfg.out);
            }
            return all ? 0 : 1;
        }
        case Experiment::VERIFY: {
            auto checks = verify(cfg);
            bool all = true;
            for (const auto &c : checks) {
                fmt::print(out, "[{}] {} ({})\n", c.pass ? "PASS" : "FAIL", c.name, c.detail);
                all = all && c.pass;
            }
            fmt::print(out, "{} of {} checks passed\n",
                       std::count_if(checks.begin(), checks.end(),
                                     [](const CheckResult &c) {
                                         return c.pass;
                                     }),
                       checks.size());
            if (cfg.out) {
                auto file = open_output(*cfg.out);
                file << "check,pass,detail\n";
                for (const auto &c : checks) {
                    fmt::print(file, "\"{}\",{},\"{}\"\n", c.name, c.pass ? 1 : 0, c.detail);
                }
                finish_output(file, *cfg.out);
            }
            return all ? 0 : 1;
        }
    }
    return 1;
}

}  // namespace branchsim
