#pragma once

// Gradients of <psi(theta)|W|psi(theta)> for a diagonal observable W:
// reverse-mode (adjoint) differentiation, the two-term parameter-shift rule,
// central finite differences, and the SPSA estimator for noisy losses.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "hqmsa/circuit.hpp"
#include "hqmsa/error.hpp"
#include "hqmsa/rng.hpp"
#include "hqmsa/statevector.hpp"

namespace hqmsa {

struct ValueAndGradient {
    double value = 0.0;
    std::vector<double> gradient;
};

/// sum_x |psi_x|^2 w_x with the amplitudes of U(theta)|0>.
[[nodiscard]] inline double diagonal_expectation(const Circuit& circuit, std::span<const double> theta,
                                                 std::span<const double> weights,
                                                 const EnergyTable* energy = nullptr) {
    std::vector<double> p;
    prepare_probabilities(circuit, theta, energy, p);
    if (weights.size() != p.size()) throw DimensionError("observable and state dimensions differ");
    double s = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) s += p[x] * weights[x];
    return s;
}

namespace detail {

/// g[b] += sum over pairs (i, i|2^b) of lam[i1]*psi[i0] - lam[i0]*psi[i1],
/// i.e. <lam|-iY_b|psi> for real vectors.
inline void ry_overlaps_real(const double* lam, const double* psi, std::size_t nbits, std::vector<double>& g) {
    const std::size_t dim = std::size_t{1} << nbits;
    std::uint64_t rest = all_bits(nbits);
    if (nbits >= 3) {
        // independent lanes so the sums vectorize without reassociation
        double a0[4] = {};
        double a1[4] = {};
        double a2[4] = {};
        for (std::size_t o = 0; o < dim; o += 8) {
            const double* l = lam + o;
            const double* p = psi + o;
            for (int j = 0; j < 4; ++j) a0[j] += l[2 * j + 1] * p[2 * j] - l[2 * j] * p[2 * j + 1];
            for (int j = 0; j < 4; ++j) {
                const int i = (j & 1) + 4 * (j >> 1);
                a1[j] += l[i + 2] * p[i] - l[i] * p[i + 2];
            }
            for (int j = 0; j < 4; ++j) a2[j] += l[j + 4] * p[j] - l[j] * p[j + 4];
        }
        g[0] += (a0[0] + a0[1]) + (a0[2] + a0[3]);
        g[1] += (a1[0] + a1[1]) + (a1[2] + a1[3]);
        g[2] += (a2[0] + a2[1]) + (a2[2] + a2[3]);
        rest &= ~std::uint64_t{7};
    }
    kernels::for_each_pair_tiled(nbits, rest, [&](std::size_t b, std::size_t i0, std::size_t i1, std::size_t n) {
        double acc[8] = {};
        const double* l0 = lam + i0;
        const double* l1 = lam + i1;
        const double* p0 = psi + i0;
        const double* p1 = psi + i1;
        if (n < 8) {  // only when nbits < 3
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t) s += l1[t] * p0[t] - l0[t] * p1[t];
            g[b] += s;
            return;
        }
        for (std::size_t t = 0; t < n; t += 8) {
            for (int j = 0; j < 8; ++j) acc[j] += l1[t + j] * p0[t + j] - l0[t + j] * p1[t + j];
        }
        g[b] += ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    });
}

/// Per-bit Re<lam|-iY_b|psi> (axis Y) or Im<lam|X_b|psi> (axis X) on complex
/// vectors.
inline std::vector<double> rotation_overlaps(std::span<const Amplitude> lam, std::span<const Amplitude> psi,
                                             std::size_t nbits, Axis axis) {
    std::vector<double> g(nbits, 0.0);
    kernels::for_each_pair_tiled(nbits, all_bits(nbits), [&](std::size_t b, std::size_t i0, std::size_t i1,
                                                             std::size_t n) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const Amplitude l0 = lam[i0 + t];
            const Amplitude l1 = lam[i1 + t];
            const Amplitude p0 = psi[i0 + t];
            const Amplitude p1 = psi[i1 + t];
            if (axis == Axis::Y) {
                s += (std::conj(l1) * p0 - std::conj(l0) * p1).real();
            } else {
                s += (std::conj(l0) * p1 + std::conj(l1) * p0).imag();
            }
        }
        g[b] += s;
    });
    return g;
}

}  // namespace detail

/// Adjoint gradient for circuits with real amplitudes, starting from the
/// already prepared forward state `psi` (consumed). `weights` is the
/// observable diagonal.
[[nodiscard]] inline ValueAndGradient adjoint_gradient_real(const Circuit& circuit, std::span<const double> theta,
                                                            std::vector<double> psi,
                                                            std::span<const double> weights) {
    detail::check_parameters(circuit, theta);
    const std::size_t n = circuit.qubits();
    if (psi.size() != (std::size_t{1} << n) || weights.size() != psi.size()) {
        throw DimensionError("adjoint: state, observable and circuit dimensions differ");
    }
    ValueAndGradient out;
    out.gradient.assign(circuit.parameter_count(), 0.0);
    std::vector<double> lam(psi.size());
    double value = 0.0;
    for (std::size_t x = 0; x < psi.size(); ++x) {
        lam[x] = weights[x] * psi[x];
        value += lam[x] * psi[x];
    }
    out.value = value;

    const auto& ops = circuit.operations();
    std::vector<double> g(n);
    for (std::size_t k = ops.size(); k-- > 0;) {
        const auto& op = ops[k];
        if (const auto* rot = std::get_if<RotationLayer>(&op)) {
            std::fill(g.begin(), g.end(), 0.0);
            detail::ry_overlaps_real(lam.data(), psi.data(), n, g);
            for (std::size_t q = 0; q < n; ++q) out.gradient[rot->first_param + q] = g[bit_position(n, q)];
            if (k == 0) break;
            const auto inv = detail::rotation_mats_y(n, theta.subspan(rot->first_param, n), -1.0);
            kernels::apply_column(std::span<double>(psi), n, detail::all_bits(n), inv);
            kernels::apply_column(std::span<double>(lam), n, detail::all_bits(n), inv);
        } else if (const auto* ent = std::get_if<EntanglerLayer>(&op)) {
            if (k == 0) break;
            const auto pairs = detail::to_bit_pairs(n, ent->pairs);
            kernels::apply_cz_set(std::span<double>(psi), pairs);
            kernels::apply_cz_set(std::span<double>(lam), pairs);
        } else if (std::holds_alternative<HadamardLayer>(op)) {
            if (k == 0) break;
            const std::vector<RealMat2> h(n, hadamard_matrix());
            kernels::apply_column(std::span<double>(psi), n, detail::all_bits(n), h);
            kernels::apply_column(std::span<double>(lam), n, detail::all_bits(n), h);
        } else {
            throw InputError("adjoint_gradient_real: circuit has complex gates");
        }
    }
    return out;
}

/// Exact gradient of <W> by reverse-mode differentiation: one forward pass,
/// then one backward sweep that un-applies each layer to both |psi> and
/// W|psi>. Works for every layer type (QAOA included).
[[nodiscard]] inline ValueAndGradient adjoint_gradient(const Circuit& circuit, std::span<const double> theta,
                                                       std::span<const double> weights,
                                                       const EnergyTable* energy = nullptr) {
    detail::check_parameters(circuit, theta);
    if (circuit.real_amplitudes()) {
        std::vector<double> psi;
        prepare_real(circuit, theta, psi);
        return adjoint_gradient_real(circuit, theta, std::move(psi), weights);
    }
    const std::size_t n = circuit.qubits();
    StateVector psi = prepare(circuit, theta, energy);
    if (weights.size() != psi.dimension()) throw DimensionError("adjoint: observable dimension mismatch");
    StateVector lam = psi;
    ValueAndGradient out;
    out.gradient.assign(circuit.parameter_count(), 0.0);
    {
        auto l = lam.amplitudes();
        double value = 0.0;
        for (std::size_t x = 0; x < l.size(); ++x) {
            value += std::norm(l[x]) * weights[x];
            l[x] *= weights[x];
        }
        out.value = value;
    }
    const auto& ops = circuit.operations();
    for (std::size_t k = ops.size(); k-- > 0;) {
        const auto& op = ops[k];
        if (const auto* rot = std::get_if<RotationLayer>(&op)) {
            const auto g = detail::rotation_overlaps(lam.amplitudes(), psi.amplitudes(), n, rot->axis);
            for (std::size_t q = 0; q < n; ++q) out.gradient[rot->first_param + q] = g[bit_position(n, q)];
        } else if (const auto* mix = std::get_if<MixerLayer>(&op)) {
            const auto g = detail::rotation_overlaps(lam.amplitudes(), psi.amplitudes(), n, Axis::X);
            double s = 0.0;
            for (double v : g) s += v;
            out.gradient[mix->param] = 2.0 * s;
        } else if (const auto* cost = std::get_if<CostLayer>(&op)) {
            const auto e = detail::cost_values(energy, n);
            const auto l = lam.amplitudes();
            const auto p = psi.amplitudes();
            double s = 0.0;
            for (std::size_t x = 0; x < p.size(); ++x) s += e[x] * (std::conj(l[x]) * p[x]).imag();
            out.gradient[cost->param] = 2.0 * s;
        }
        if (k == 0) break;
        apply_operation(psi, op, theta, energy, -1.0);
        apply_operation(lam, op, theta, energy, -1.0);
    }
    return out;
}

/// [C(theta_k + pi/2) - C(theta_k - pi/2)] / 2 for every parameter. Exact
/// only when each parameter drives one Pauli rotation exp(-i theta P / 2).
[[nodiscard]] inline std::vector<double> parameter_shift_gradient(const Circuit& circuit,
                                                                  std::span<const double> theta,
                                                                  std::span<const double> weights) {
    detail::check_parameters(circuit, theta);
    if (!circuit.shift_rule_applies()) {
        throw InputError("parameter-shift rule does not apply to this ansatz (use adjoint or finite differences)");
    }
    std::vector<double> shifted(theta.begin(), theta.end());
    std::vector<double> g(theta.size());
    constexpr double s = std::numbers::pi / 2.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        shifted[k] = theta[k] + s;
        const double plus = diagonal_expectation(circuit, shifted, weights);
        shifted[k] = theta[k] - s;
        const double minus = diagonal_expectation(circuit, shifted, weights);
        shifted[k] = theta[k];
        g[k] = 0.5 * (plus - minus);
    }
    return g;
}

using LossFunction = std::function<double(std::span<const double>)>;

[[nodiscard]] inline std::vector<double> finite_difference_gradient(const LossFunction& f,
                                                                    std::span<const double> theta,
                                                                    double h = 1e-5) {
    if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
    std::vector<double> x(theta.begin(), theta.end());
    std::vector<double> g(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        x[k] = theta[k] + h;
        const double plus = f(x);
        x[k] = theta[k] - h;
        const double minus = f(x);
        x[k] = theta[k];
        g[k] = (plus - minus) / (2.0 * h);
    }
    return g;
}

struct SpsaConfig {
    double a = 0.2;
    double c = 0.1;
    double stability = 10.0;  // A in a_t = a / (t + 1 + A)^alpha
    double alpha = 0.602;
    double gamma = 0.101;

    [[nodiscard]] double step(std::size_t t) const {
        return a / std::pow(static_cast<double>(t) + 1.0 + stability, alpha);
    }
    [[nodiscard]] double perturbation(std::size_t t) const {
        return c / std::pow(static_cast<double>(t) + 1.0, gamma);
    }
};

struct SpsaEstimate {
    std::vector<double> gradient;
    double loss_plus = 0.0;
    double loss_minus = 0.0;
};

/// One simultaneous Rademacher perturbation, exactly two loss evaluations.
[[nodiscard]] inline SpsaEstimate spsa_gradient(const LossFunction& f, std::span<const double> theta, std::size_t t,
                                                const SpsaConfig& cfg, Rng& rng) {
    const double ct = cfg.perturbation(t);
    if (!(ct > 0.0)) throw InputError("SPSA perturbation c_t must be positive");
    std::vector<double> delta(theta.size());
    for (auto& d : delta) d = rng.rademacher();
    std::vector<double> plus(theta.begin(), theta.end());
    std::vector<double> minus(theta.begin(), theta.end());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        plus[k] += ct * delta[k];
        minus[k] -= ct * delta[k];
    }
    SpsaEstimate out;
    out.loss_plus = f(plus);
    out.loss_minus = f(minus);
    const double diff = out.loss_plus - out.loss_minus;
    out.gradient.resize(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) out.gradient[k] = diff / (2.0 * ct * delta[k]);
    return out;
}

}  // namespace hqmsa
