#pragma once

// Scenario and study execution: run_vqe per seed over a worker pool, then an
// ordered reduction into per-arm aggregates. Results depend only on the
// config and the seeds, never on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hqmsa/config.hpp"
#include "hqmsa/instances.hpp"
#include "hqmsa/optimizer.hpp"
#include "hqmsa/problem.hpp"
#include "hqmsa/stats.hpp"

namespace hqmsa {

/// Final-state ground probability at or above this counts as a hit.
inline constexpr double kHitThreshold = 0.5;

struct SeedResult {
    std::uint64_t seed = 0;
    double final_expectation = 0.0;
    double final_loss = 0.0;
    double final_ground_probability = 0.0;
    bool hit = false;
    std::uint64_t best_index = 0;  // register index
    double best_energy = 0.0;
    std::uint64_t modal_index = 0;
    double modal_energy = 0.0;
    double mean_iteration_seconds = 0.0;
    TrainingTrace trace;
};

struct ArmResult {
    std::string label;
    AnsatzSpec ansatz;
    OptimizerConfig optimizer;
    CvarConfig cvar;
    NoiseConfig noise;
    std::vector<SeedResult> seeds;

    double mean_final = 0.0;
    double median_final = 0.0;
    double std_final = 0.0;
    double hit_rate = 0.0;
    double best_optimal_rate = 0.0;   // best-ever sample at the oracle minimum
    double modal_optimal_rate = 0.0;  // final modal state at the oracle minimum
    double mean_iteration_seconds = 0.0;

    [[nodiscard]] std::vector<double> final_energies() const {
        std::vector<double> v;
        for (const auto& s : seeds) v.push_back(s.final_expectation);
        return v;
    }
};

/// One-sided Welch test of H1: mean(lhs) < mean(rhs) on final expectations.
struct Comparison {
    std::string lhs;
    std::string rhs;
    stats::TestResult test;
    double mean_lhs = 0.0;
    double mean_rhs = 0.0;
};

struct StudyResult {
    std::string kind;  // "scenario" or a study kind
    std::optional<double> global_minimum;
    std::vector<ArmResult> arms;
    std::vector<Comparison> comparisons;

    [[nodiscard]] const ArmResult& arm(const std::string& label) const {
        for (const auto& a : arms) {
            if (a.label == label) return a;
        }
        throw InputError("no arm labelled '" + label + "'");
    }
};

/// Runs `jobs` indexed tasks on up to `workers` threads; the first exception
/// (lowest index) is rethrown after all workers join.
template <class Task>
void parallel_for(std::size_t jobs, std::size_t workers, const Task& task) {
    if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs);
    std::vector<std::exception_ptr> errors(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < jobs;) {
                    try {
                        task(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct ExecutionOptions {
    std::size_t workers = 0;  // 0: hardware concurrency
    RunOptions run;
};

[[nodiscard]] inline Problem make_problem(const ScenarioConfig& c) {
    return Problem(c.sequence_set(), PenaltyParam(c.penalty), c.clamp_reference);
}

namespace detail {

inline SeedResult summarize_seed(const Problem& problem, std::uint64_t seed, TrainingTrace trace) {
    SeedResult s;
    s.seed = seed;
    s.final_expectation = trace.final_expectation;
    s.final_loss = trace.records.back().loss;
    s.final_ground_probability = trace.final_ground_probability;
    s.hit = s.final_ground_probability >= kHitThreshold;
    s.best_index = trace.best_index;
    s.best_energy = trace.best_energy;
    s.modal_index = trace.final_shots.modal();
    s.modal_energy = problem.energy(s.modal_index);
    double t = 0.0;
    for (const auto& r : trace.records) t += r.seconds;
    s.mean_iteration_seconds = t / static_cast<double>(trace.records.size());
    s.trace = std::move(trace);
    return s;
}

inline void aggregate(ArmResult& arm, std::optional<double> global_min) {
    const auto finals = arm.final_energies();
    const double n = static_cast<double>(arm.seeds.size());
    arm.mean_final = stats::mean(finals);
    arm.median_final = stats::median(finals);
    arm.std_final = arm.seeds.size() > 1 ? stats::stddev(finals) : 0.0;
    std::size_t hits = 0, best = 0, modal = 0;
    double secs = 0.0;
    for (const auto& s : arm.seeds) {
        hits += s.hit ? 1 : 0;
        if (global_min) {
            best += s.best_energy == *global_min ? 1 : 0;
            modal += s.modal_energy == *global_min ? 1 : 0;
        }
        secs += s.mean_iteration_seconds;
    }
    arm.hit_rate = static_cast<double>(hits) / n;
    arm.best_optimal_rate = static_cast<double>(best) / n;
    arm.modal_optimal_rate = static_cast<double>(modal) / n;
    arm.mean_iteration_seconds = secs / n;
}

inline Comparison compare(const ArmResult& lhs, const ArmResult& rhs) {
    Comparison c;
    c.lhs = lhs.label;
    c.rhs = rhs.label;
    const auto a = lhs.final_energies();
    const auto b = rhs.final_energies();
    c.mean_lhs = stats::mean(a);
    c.mean_rhs = stats::mean(b);
    if (a.size() > 1 && b.size() > 1) c.test = stats::welch_less(a, b);
    return c;
}

}  // namespace detail

/// Template for one arm: the settings every seed of it shares.
struct ArmSpec {
    std::string label;
    AnsatzSpec ansatz;
    OptimizerConfig optimizer;
    CvarConfig cvar;
    NoiseConfig noise;
};

/// Runs every (arm, seed) pair in one pool and reduces in order.
[[nodiscard]] inline std::vector<ArmResult> run_arms(const Problem& problem, const std::vector<ArmSpec>& specs,
                                                     const std::vector<std::uint64_t>& seeds,
                                                     const ExecutionOptions& exec = {}) {
    const auto global_min = problem.table_minimum();
    std::vector<ArmResult> arms(specs.size());
    for (std::size_t a = 0; a < specs.size(); ++a) {
        arms[a].label = specs[a].label;
        arms[a].ansatz = specs[a].ansatz;
        arms[a].optimizer = specs[a].optimizer;
        arms[a].cvar = specs[a].cvar;
        arms[a].noise = specs[a].noise;
        arms[a].seeds.resize(seeds.size());
    }
    parallel_for(specs.size() * seeds.size(), exec.workers, [&](std::size_t job) {
        const std::size_t a = job / seeds.size();
        const std::size_t k = job % seeds.size();
        OptimizerConfig opt = specs[a].optimizer;
        opt.seed = seeds[k];
        auto trace = run_vqe(problem, specs[a].ansatz, opt, specs[a].cvar, specs[a].noise, exec.run);
        arms[a].seeds[k] = detail::summarize_seed(problem, seeds[k], std::move(trace));
    });
    for (auto& arm : arms) detail::aggregate(arm, global_min);
    return arms;
}

[[nodiscard]] inline ArmSpec base_arm(const ScenarioConfig& c, std::string label) {
    return {std::move(label), c.ansatz, c.optimizer, c.cvar, c.noise};
}

/// The scenario as configured: one arm, one run_vqe per seed.
[[nodiscard]] inline StudyResult run_scenario(const ScenarioConfig& config, const ExecutionOptions& exec = {}) {
    const Problem problem = make_problem(config);
    StudyResult r;
    r.kind = "scenario";
    r.global_minimum = problem.table_minimum();
    r.arms = run_arms(problem, {base_arm(config, "run")}, config.seeds, exec);
    return r;
}

/// Arms for a study kind, derived from the base config.
[[nodiscard]] inline std::vector<ArmSpec> study_arms(const ScenarioConfig& c, StudyKind kind) {
    std::vector<ArmSpec> arms;
    switch (kind) {
        case StudyKind::EntanglementSweep:
            for (std::size_t d : c.study.layers) {
                auto a = base_arm(c, "d" + std::to_string(d));
                a.ansatz.kind = AnsatzKind::Hea;
                a.ansatz.layers = d;
                arms.push_back(a);
            }
            break;
        case StudyKind::CvarCompare: {
            auto two = base_arm(c, "two-stage");
            two.cvar = CvarConfig{c.study.warm_r0, c.study.warmup, 1.0};
            auto standard = base_arm(c, "standard");
            standard.cvar = CvarConfig{1.0, 0, 1.0};
            arms = {two, standard};
            break;
        }
        case StudyKind::QaoaVsHea: {
            auto hea = base_arm(c, "hea");
            hea.ansatz.kind = AnsatzKind::Hea;
            hea.ansatz.layers = c.study.hea_layers;
            auto qaoa = base_arm(c, "qaoa");
            qaoa.ansatz.kind = AnsatzKind::Qaoa;
            qaoa.ansatz.layers = c.study.qaoa_rounds;
            // the two-term shift rule does not cover the cost layer
            if (qaoa.optimizer.method == GradientMethod::ParameterShift) {
                qaoa.optimizer.method = GradientMethod::Adjoint;
            }
            arms = {hea, qaoa};
            break;
        }
        case StudyKind::NoiseCompare: {
            auto clean = base_arm(c, "noiseless");
            clean.noise = NoiseConfig{0.0, 0.0, 0.0, c.noise.trajectories};
            if (clean.optimizer.method == GradientMethod::Spsa) clean.optimizer.method = GradientMethod::Adjoint;
            auto noisy = base_arm(c, "noisy");
            noisy.noise = c.study.noise;
            noisy.optimizer.method = GradientMethod::Spsa;
            auto spsa = base_arm(c, "noiseless-spsa");
            spsa.noise = NoiseConfig{0.0, 0.0, 0.0, c.noise.trajectories};
            spsa.optimizer.method = GradientMethod::Spsa;
            arms = {clean, noisy, spsa};
            break;
        }
    }
    for (auto& a : arms) a.ansatz.qubits = c.ansatz.qubits;
    return arms;
}

[[nodiscard]] inline StudyResult run_study(StudyKind kind, const ScenarioConfig& config,
                                           const ExecutionOptions& exec = {}) {
    const Problem problem = make_problem(config);
    StudyResult r;
    r.kind = to_string(kind);
    r.global_minimum = problem.table_minimum();
    r.arms = run_arms(problem, study_arms(config, kind), config.seeds, exec);
    if (config.seeds.size() > 1) {
        switch (kind) {
            case StudyKind::EntanglementSweep:
                for (std::size_t a = 1; a < r.arms.size(); ++a) {
                    r.comparisons.push_back(detail::compare(r.arms[a], r.arms[a - 1]));
                }
                break;
            case StudyKind::CvarCompare:
                r.comparisons.push_back(detail::compare(r.arms[0], r.arms[1]));
                r.comparisons.push_back(detail::compare(r.arms[1], r.arms[0]));
                break;
            case StudyKind::QaoaVsHea:
                r.comparisons.push_back(detail::compare(r.arms[0], r.arms[1]));
                break;
            case StudyKind::NoiseCompare:
                r.comparisons.push_back(detail::compare(r.arms[0], r.arms[1]));
                break;
        }
    }
    return r;
}

struct TimingRow {
    std::string instance;
    std::size_t qubits = 0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
    std::vector<double> samples;  // raw per-iteration wall times
};

/// Mean wall time per iteration on the q4..q16 stand-ins (or any named
/// instances), using the base config's ansatz and optimizer settings.
[[nodiscard]] inline std::vector<TimingRow> timing_report(const ScenarioConfig& base,
                                                          const std::vector<std::string>& instances,
                                                          std::size_t iterations) {
    std::vector<TimingRow> rows;
    for (const auto& name : instances) {
        const auto& inst = find_instance(name);
        const Problem problem(inst.to_set(), PenaltyParam(base.penalty));
        AnsatzSpec spec = base.ansatz;
        spec.qubits = problem.register_qubits();
        TimingRow row;
        row.instance = name;
        row.qubits = spec.qubits;
        for (auto seed : base.seeds) {
            OptimizerConfig opt = base.optimizer;
            opt.max_iters = iterations;
            opt.seed = seed;
            // parameter shift is not defined for QAOA; time the adjoint instead
            if (spec.kind == AnsatzKind::Qaoa && opt.method == GradientMethod::ParameterShift) {
                opt.method = GradientMethod::Adjoint;
            }
            const auto trace = run_vqe(problem, spec, opt, base.cvar, base.noise, {false, false});
            // the closing record only evaluates; skip it
            for (std::size_t t = 0; t + 1 < trace.records.size(); ++t) {
                row.samples.push_back(trace.records[t].seconds);
            }
        }
        row.mean_seconds = stats::mean(row.samples);
        row.std_seconds = row.samples.size() > 1 ? stats::stddev(row.samples) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hqmsa
