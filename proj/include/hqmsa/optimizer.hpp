#pragma once

// The variational loop: shot-based CVaR estimates, gradients, Adam (or plain
// SPSA steps), the two-stage CVaR schedule, and the training trace.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hqmsa/circuit.hpp"
#include "hqmsa/cvar.hpp"
#include "hqmsa/error.hpp"
#include "hqmsa/gradient.hpp"
#include "hqmsa/problem.hpp"
#include "hqmsa/rng.hpp"
#include "hqmsa/sampling.hpp"

namespace hqmsa {

enum class GradientMethod { Adjoint, ParameterShift, FiniteDifference, Spsa };
enum class UpdateRule { Adam, Spsa };

[[nodiscard]] inline std::string to_string(GradientMethod m) {
    switch (m) {
        case GradientMethod::Adjoint: return "adjoint";
        case GradientMethod::ParameterShift: return "parameter-shift";
        case GradientMethod::FiniteDifference: return "finite-difference";
        default: return "spsa";
    }
}
[[nodiscard]] inline std::string to_string(UpdateRule u) { return u == UpdateRule::Adam ? "adam" : "spsa"; }

struct AdamConfig {
    double step = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam(std::size_t dim, AdamConfig cfg) : cfg_(cfg), m_(dim, 0.0), v_(dim, 0.0) {}

    void step(std::span<double> theta, std::span<const double> grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * grad[k];
            v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * grad[k] * grad[k];
            theta[k] -= cfg_.step * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + cfg_.epsilon);
        }
    }

private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

struct OptimizerConfig {
    GradientMethod method = GradientMethod::Adjoint;
    UpdateRule update = UpdateRule::Adam;
    AdamConfig adam;
    SpsaConfig spsa;
    double fd_step = 1e-5;
    std::uint64_t shots = 2000;
    std::size_t max_iters = 400;
    std::uint64_t seed = 0;

    void validate() const {
        if (shots == 0) throw ConfigError("optimizer.shots", "must be at least 1");
        if (!(adam.step > 0.0)) throw ConfigError("optimizer.adam.step", "must be positive");
        if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw ConfigError("optimizer.adam.beta1", "must lie in [0, 1)");
        if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw ConfigError("optimizer.adam.beta2", "must lie in [0, 1)");
        if (!(adam.epsilon > 0.0)) throw ConfigError("optimizer.adam.epsilon", "must be positive");
        if (!(spsa.a > 0.0)) throw ConfigError("optimizer.spsa.a", "must be positive");
        if (!(spsa.c > 0.0)) throw ConfigError("optimizer.spsa.c", "must be positive");
        if (!(spsa.stability >= 0.0)) throw ConfigError("optimizer.spsa.A", "must be non-negative");
        if (!(fd_step > 0.0)) throw ConfigError("optimizer.fd_step", "must be positive");
    }
};

/// r0 for the first `warmup_iters` iterations, r_final afterwards.
struct CvarConfig {
    double r0 = 1.0;
    std::size_t warmup_iters = 0;
    double r_final = 1.0;

    [[nodiscard]] double ratio(std::size_t t) const noexcept { return t < warmup_iters ? r0 : r_final; }

    void validate() const {
        if (!(r0 > 0.0 && r0 <= 1.0)) throw ConfigError("cvar.r0", "must lie in (0, 1]");
        if (!(r_final > 0.0 && r_final <= 1.0)) throw ConfigError("cvar.r_final", "must lie in (0, 1]");
    }
};

struct TraceRecord {
    std::size_t iteration = 0;
    std::vector<double> theta;
    double loss = 0.0;          // shot-based CVaR estimate at ratio r
    double r = 1.0;
    double expectation = 0.0;   // exact <H> (trajectory mean when noisy)
    double ground_probability = 0.0;  // exact mass on the minimum-energy level (noiseless)
    double best_energy = 0.0;   // lowest sampled energy so far
    double seconds = 0.0;       // wall time of this iteration (evaluation + update)
    std::optional<ShotTable> shots;
};

struct TrainingTrace {
    std::vector<TraceRecord> records;
    std::uint64_t best_index = 0;  // register index of the best sampled state
    double best_energy = std::numeric_limits<double>::infinity();
    std::vector<double> final_theta;
    double final_expectation = 0.0;
    double final_ground_probability = 0.0;
    ShotTable final_shots;
};

struct RunOptions {
    bool keep_shot_tables = true;  // store every iteration's table in the trace
    bool record_theta = true;
};

namespace detail {

struct Evaluation {
    ShotTable shots;
    double loss = 0.0;
    double expectation = 0.0;
    double ground_probability = 0.0;
    std::vector<double> probabilities;  // noiseless only
    std::vector<double> amplitudes;     // real-path forward state, noiseless only
};

/// Scratch space and fixed inputs for one run.
class Evaluator {
public:
    Evaluator(const Problem& problem, const Circuit& circuit, const NoiseConfig& noise)
        : problem_(problem), circuit_(circuit), noise_(noise) {}

    /// Prepares |psi(theta)>, samples `shots`, and scores them. Randomness
    /// comes only from `seed`.
    Evaluation evaluate(std::span<const double> theta, double r, std::uint64_t shots, std::uint64_t seed,
                        bool keep_state) const {
        Evaluation ev;
        const auto& table = problem_.table();
        const auto energies = table.values();
        ev.shots = ShotTable(problem_.register_qubits());
        if (!noise_.gate_noise()) {
            if (circuit_.real_amplitudes()) {
                prepare_real(circuit_, theta, ev.amplitudes);
                ev.probabilities.resize(ev.amplitudes.size());
                for (std::size_t x = 0; x < ev.amplitudes.size(); ++x) {
                    ev.probabilities[x] = ev.amplitudes[x] * ev.amplitudes[x];
                }
            } else {
                prepare_probabilities(circuit_, theta, &table, ev.probabilities);
            }
            Rng rng(seed);
            sample_into(ev.shots, ev.probabilities, shots, rng, noise_.readout_flip);
            const auto mass = problem_.levels().mass(ev.probabilities);
            double s = 0.0;
            for (std::size_t l = 0; l < mass.size(); ++l) s += mass[l] * problem_.levels().values()[l];
            ev.expectation = s;
            ev.ground_probability = mass.front();
            if (!keep_state) {
                ev.probabilities.clear();
                ev.amplitudes.clear();
            }
        } else {
            const std::size_t T = noise_.trajectories;
            double s = 0.0;
            double ground = 0.0;
            for (std::size_t j = 0; j < T; ++j) {
                const std::uint64_t part = shots / T + (j < shots % T ? 1 : 0);
                Rng gate_rng(derive_seed(seed, j, 0));
                const auto psi = prepare_noisy(circuit_, theta, &table, noise_, gate_rng);
                const auto p = psi.probabilities();
                double e = 0.0;
                for (std::size_t x = 0; x < p.size(); ++x) e += p[x] * energies[x];
                s += e;
                ground += problem_.levels().mass(p).front();
                if (part == 0) continue;
                Rng shot_rng(derive_seed(seed, j, 1));
                sample_into(ev.shots, p, part, shot_rng, noise_.readout_flip);
            }
            ev.expectation = s / static_cast<double>(T);
            ev.ground_probability = ground / static_cast<double>(T);
        }
        ev.loss = cvar_loss(shot_energies(ev.shots, [&](std::uint64_t x) { return table[x]; }), r);
        return ev;
    }

private:
    const Problem& problem_;
    const Circuit& circuit_;
    const NoiseConfig& noise_;
};

}  // namespace detail

/// Shot-based CVaR loss at theta; the hybrid split in one call: the circuit is
/// sampled, every shot is scored classically, and the tail is averaged.
struct LossEstimate {
    double loss = 0.0;
    ShotTable shots;
};

[[nodiscard]] inline LossEstimate estimate_loss(const Problem& problem, const Circuit& circuit,
                                                std::span<const double> theta, double r, std::uint64_t shots,
                                                std::uint64_t seed, const NoiseConfig& noise = {}) {
    check_ratio(r);
    noise.validate();
    detail::Evaluator ev(problem, circuit, noise);
    auto e = ev.evaluate(theta, r, shots, seed, false);
    return {e.loss, std::move(e.shots)};
}

[[nodiscard]] inline std::vector<double> initial_parameters(std::size_t count, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0));
    std::vector<double> theta(count);
    for (auto& t : theta) t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return theta;
}

inline constexpr double kQaoaRampStep = 0.5;

/// QAOA start: a discretized anneal, gamma_t = dt*s_t and beta_t = -dt*(1-s_t)
/// with s_t = (t + 1/2)/p, each angle jittered by up to 5% of dt per seed.
/// Uniform random angles put the cost phase far outside its useful range.
[[nodiscard]] inline std::vector<double> qaoa_ramp_parameters(std::size_t rounds, std::uint64_t seed,
                                                              double dt = kQaoaRampStep) {
    Rng rng(derive_seed(seed, 0));
    std::vector<double> theta(2 * rounds);
    for (std::size_t t = 0; t < rounds; ++t) {
        const double s = (static_cast<double>(t) + 0.5) / static_cast<double>(rounds);
        theta[2 * t] = dt * s + rng.uniform(-0.05, 0.05) * dt;
        theta[2 * t + 1] = -dt * (1.0 - s) + rng.uniform(-0.05, 0.05) * dt;
    }
    return theta;
}

[[nodiscard]] inline std::vector<double> initial_parameters(const AnsatzSpec& spec, std::uint64_t seed) {
    return spec.kind == AnsatzKind::Qaoa ? qaoa_ramp_parameters(spec.layers, seed)
                                         : initial_parameters(spec.parameter_count(), seed);
}

/// Runs the variational loop for `max_iters` updates. Iteration t (0..max)
/// evaluates the current parameters with r = cvar.ratio(t) and records the
/// result; iterations below max_iters then take one optimizer step. The
/// reported solution is the lowest-energy state sampled in any record.
[[nodiscard]] inline TrainingTrace run_vqe(const Problem& problem, const AnsatzSpec& spec,
                                           const OptimizerConfig& opt, const CvarConfig& cvar,
                                           const NoiseConfig& noise = {}, const RunOptions& options = {}) {
    opt.validate();
    cvar.validate();
    noise.validate();
    if (spec.qubits != problem.register_qubits()) {
        throw DimensionError("ansatz has " + std::to_string(spec.qubits) + " qubits, problem register has " +
                             std::to_string(problem.register_qubits()));
    }
    if (noise.gate_noise() && opt.method != GradientMethod::Spsa) {
        throw ConfigError("optimizer.method", "gate noise requires the spsa gradient method");
    }
    const Circuit circuit = build_circuit(spec);
    if (opt.method == GradientMethod::ParameterShift && !circuit.shift_rule_applies()) {
        throw ConfigError("optimizer.method", "parameter-shift does not apply to the " + to_string(spec.kind) +
                                                  " ansatz; use adjoint, finite-difference or spsa");
    }
    const EnergyTable& table = problem.table();
    const EnergyLevels& levels = problem.levels();
    detail::Evaluator evaluator(problem, circuit, noise);

    TrainingTrace trace;
    std::vector<double> theta = initial_parameters(spec, opt.seed);
    Adam adam(theta.size(), opt.adam);
    Rng perturb_rng(derive_seed(opt.seed, 2));
    std::vector<double> weights;
    const bool exact_method = opt.method != GradientMethod::Spsa;

    for (std::size_t t = 0;; ++t) {
        const auto start = std::chrono::steady_clock::now();
        const double r = cvar.ratio(t);
        auto ev = evaluator.evaluate(theta, r, opt.shots, derive_seed(opt.seed, 1, 3 * t), exact_method);

        for (const auto& [idx, c] : ev.shots.counts()) {
            const double e = table[idx];
            if (e < trace.best_energy) {
                trace.best_energy = e;
                trace.best_index = idx;
            }
        }
        TraceRecord rec;
        rec.iteration = t;
        if (options.record_theta) rec.theta = theta;
        rec.loss = ev.loss;
        rec.r = r;
        rec.expectation = ev.expectation;
        rec.ground_probability = ev.ground_probability;
        rec.best_energy = trace.best_energy;

        if (t == opt.max_iters) {
            trace.final_theta = theta;
            trace.final_expectation = ev.expectation;
            trace.final_ground_probability = ev.ground_probability;
            trace.final_shots = ev.shots;
            if (options.keep_shot_tables) rec.shots = std::move(ev.shots);
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            trace.records.push_back(std::move(rec));
            break;
        }

        std::vector<double> grad;
        if (opt.method == GradientMethod::Spsa) {
            std::uint64_t call = 0;
            auto loss = [&](std::span<const double> th) {
                ++call;
                return evaluator.evaluate(th, r, opt.shots, derive_seed(opt.seed, 1, 3 * t + call), false).loss;
            };
            grad = spsa_gradient(loss, theta, t, opt.spsa, perturb_rng).gradient;
        } else {
            const auto ec = exact_cvar(levels, ev.probabilities, r);
            weights.resize(ev.probabilities.size());
            for (std::size_t x = 0; x < weights.size(); ++x) weights[x] = ec.level_weight[levels.level(x)];
            if (opt.method == GradientMethod::Adjoint) {
                grad = circuit.real_amplitudes()
                           ? adjoint_gradient_real(circuit, theta, std::move(ev.amplitudes), weights).gradient
                           : adjoint_gradient(circuit, theta, weights, &table).gradient;
            } else if (opt.method == GradientMethod::ParameterShift) {
                grad = parameter_shift_gradient(circuit, theta, weights);
            } else {
                auto f = [&](std::span<const double> th) {
                    std::vector<double> p;
                    prepare_probabilities(circuit, th, &table, p);
                    return exact_cvar(levels, p, r).value;
                };
                grad = finite_difference_gradient(f, theta, opt.fd_step);
            }
        }
        if (opt.update == UpdateRule::Adam) {
            adam.step(theta, grad);
        } else {
            const double a = opt.spsa.step(t);
            for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= a * grad[k];
        }
        if (options.keep_shot_tables) rec.shots = std::move(ev.shots);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace hqmsa
