#pragma once

// Parameterized circuits: the hardware-efficient ansatz (rotation columns
// interleaved with CZ entangler columns) and a diagonal-phase QAOA ansatz.
// A circuit is a flat list of layer operations so alternative block
// structures can be assembled without touching the optimizer.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hqmsa/error.hpp"
#include "hqmsa/rng.hpp"
#include "hqmsa/scoring.hpp"
#include "hqmsa/statevector.hpp"

namespace hqmsa {

enum class AnsatzKind { Hea, Qaoa };
enum class Topology { Linear, Ring };
enum class Axis { X, Y };

[[nodiscard]] inline std::string to_string(AnsatzKind k) { return k == AnsatzKind::Hea ? "hea" : "qaoa"; }
[[nodiscard]] inline std::string to_string(Topology t) { return t == Topology::Linear ? "linear" : "ring"; }

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::Hea;
    std::size_t qubits = 0;
    std::size_t layers = 2;  // entangling layers (HEA) or rounds (QAOA)
    Topology topology = Topology::Linear;

    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return kind == AnsatzKind::Hea ? qubits * (layers + 1) : 2 * layers;
    }
};

/// One angle per qubit: theta[first_param + q] rotates qubit q about `axis`.
struct RotationLayer {
    Axis axis = Axis::Y;
    std::size_t first_param = 0;
};

/// exp(-i beta X) on every qubit, beta = theta[param].
struct MixerLayer {
    std::size_t param = 0;
};

/// CZ on each (qubit, qubit) pair.
struct EntanglerLayer {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// exp(-i gamma H_p) applied element-wise from the energy table.
struct CostLayer {
    std::size_t param = 0;
};

struct HadamardLayer {};

using Operation = std::variant<RotationLayer, MixerLayer, EntanglerLayer, CostLayer, HadamardLayer>;

class Circuit {
public:
    Circuit(std::size_t qubits, std::size_t parameter_count, std::vector<Operation> ops)
        : qubits_(qubits), parameter_count_(parameter_count), ops_(std::move(ops)) {}

    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return parameter_count_; }
    [[nodiscard]] const std::vector<Operation>& operations() const noexcept { return ops_; }

    [[nodiscard]] bool needs_energy() const noexcept {
        for (const auto& op : ops_) {
            if (std::holds_alternative<CostLayer>(op)) return true;
        }
        return false;
    }

    /// True when every layer has a real matrix (Y rotations, CZ, Hadamard), so
    /// amplitudes stay real starting from |0...0>.
    [[nodiscard]] bool real_amplitudes() const noexcept {
        for (const auto& op : ops_) {
            if (const auto* rot = std::get_if<RotationLayer>(&op); rot && rot->axis == Axis::Y) continue;
            if (std::holds_alternative<EntanglerLayer>(op) || std::holds_alternative<HadamardLayer>(op)) continue;
            return false;
        }
        return true;
    }

    /// True when every parameter drives exactly one Pauli rotation, so the
    /// two-term shift rule is exact.
    [[nodiscard]] bool shift_rule_applies() const noexcept {
        for (const auto& op : ops_) {
            if (std::holds_alternative<CostLayer>(op) || std::holds_alternative<MixerLayer>(op)) {
                return false;
            }
        }
        return true;
    }

private:
    std::size_t qubits_;
    std::size_t parameter_count_;
    std::vector<Operation> ops_;
};

[[nodiscard]] inline EntanglerLayer entangler(std::size_t qubits, Topology topology) {
    EntanglerLayer layer;
    for (std::size_t q = 0; q + 1 < qubits; ++q) layer.pairs.emplace_back(q, q + 1);
    if (topology == Topology::Ring && qubits > 2) layer.pairs.emplace_back(qubits - 1, 0);
    return layer;
}

/// Rotation column, then `layers` x (CZ column, rotation column).
[[nodiscard]] inline Circuit make_hea(std::size_t qubits, std::size_t layers,
                                      Topology topology = Topology::Linear) {
    std::vector<Operation> ops;
    ops.push_back(RotationLayer{Axis::Y, 0});
    for (std::size_t d = 1; d <= layers; ++d) {
        ops.push_back(entangler(qubits, topology));
        ops.push_back(RotationLayer{Axis::Y, d * qubits});
    }
    return {qubits, qubits * (layers + 1), std::move(ops)};
}

/// Hadamard wall, then `rounds` x (cost phase gamma_t, mixer beta_t) with
/// parameters ordered [gamma_1, beta_1, gamma_2, beta_2, ...].
[[nodiscard]] inline Circuit make_qaoa(std::size_t qubits, std::size_t rounds) {
    std::vector<Operation> ops;
    ops.push_back(HadamardLayer{});
    for (std::size_t t = 0; t < rounds; ++t) {
        ops.push_back(CostLayer{2 * t});
        ops.push_back(MixerLayer{2 * t + 1});
    }
    return {qubits, 2 * rounds, std::move(ops)};
}

[[nodiscard]] inline Circuit build_circuit(const AnsatzSpec& spec) {
    if (spec.qubits == 0) throw DimensionError("ansatz needs at least one qubit");
    return spec.kind == AnsatzKind::Hea ? make_hea(spec.qubits, spec.layers, spec.topology)
                                        : make_qaoa(spec.qubits, spec.layers);
}

struct NoiseConfig {
    double single_qubit_rate = 0.0;
    double two_qubit_rate = 0.0;
    double readout_flip = 0.0;
    std::size_t trajectories = 10;  // state trajectories per loss evaluation

    [[nodiscard]] bool noiseless() const noexcept {
        return single_qubit_rate == 0.0 && two_qubit_rate == 0.0 && readout_flip == 0.0;
    }
    [[nodiscard]] bool gate_noise() const noexcept {
        return single_qubit_rate > 0.0 || two_qubit_rate > 0.0;
    }

    void validate() const {
        auto check = [](double r, const char* name) {
            if (!(r >= 0.0 && r < 1.0)) throw ConfigError(std::string("noise.") + name, "rate must lie in [0, 1)");
        };
        check(single_qubit_rate, "single_qubit_rate");
        check(two_qubit_rate, "two_qubit_rate");
        check(readout_flip, "readout_flip");
        if (trajectories == 0) throw ConfigError("noise.trajectories", "must be at least 1");
    }
};

namespace detail {

inline void check_parameters(const Circuit& circuit, std::span<const double> theta) {
    if (theta.size() != circuit.parameter_count()) {
        throw DimensionError("parameter vector has length " + std::to_string(theta.size()) +
                             ", circuit expects " + std::to_string(circuit.parameter_count()));
    }
}

inline std::vector<std::pair<std::size_t, std::size_t>> to_bit_pairs(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(pairs.size());
    for (auto [a, b] : pairs) out.emplace_back(bit_position(n, a), bit_position(n, b));
    return out;
}

inline std::vector<RealMat2> rotation_mats_y(std::size_t n, std::span<const double> angles,
                                             double sign = 1.0) {
    std::vector<RealMat2> mats(n);
    for (std::size_t q = 0; q < n; ++q) mats[bit_position(n, q)] = ry_matrix(sign * angles[q]);
    return mats;
}

inline std::vector<Mat2> rotation_mats_x(std::size_t n, std::span<const double> angles,
                                         double sign = 1.0) {
    std::vector<Mat2> mats(n);
    for (std::size_t q = 0; q < n; ++q) mats[bit_position(n, q)] = rx_matrix(sign * angles[q]);
    return mats;
}

inline std::uint64_t all_bits(std::size_t n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

/// Product state prod_q RY(angle_q)|0>: the outer product of the two
/// half-register product vectors.
template <class T>
void product_ry_state(std::span<T> amp, std::span<const double> angles) {
    auto half = [](std::span<const double> a) {
        std::vector<double> v(std::size_t{1} << a.size());
        std::size_t size = 1;
        v[0] = 1.0;
        for (double angle : a) {
            const double c = std::cos(0.5 * angle);
            const double s = std::sin(0.5 * angle);
            for (std::size_t i = size; i-- > 0;) {
                const double x = v[i];
                v[2 * i] = x * c;
                v[2 * i + 1] = x * s;
            }
            size *= 2;
        }
        return v;
    };
    const std::size_t hi_count = angles.size() / 2;
    const auto hi = half(angles.first(hi_count));
    const auto lo = half(angles.subspan(hi_count));
    T* out = amp.data();
    for (std::size_t h = 0; h < hi.size(); ++h) {
        const double a = hi[h];
        for (std::size_t l = 0; l < lo.size(); ++l) out[h * lo.size() + l] = a * lo[l];
    }
}

inline std::span<const double> cost_values(const EnergyTable* energy, std::size_t qubits) {
    if (energy == nullptr) throw InputError("QAOA cost layer needs an energy table");
    if (energy->qubits() != qubits) throw DimensionError("energy table and circuit disagree on qubit count");
    return energy->values();
}

}  // namespace detail

/// Applies one layer to `psi`. `sign = -1` applies the inverse.
inline void apply_operation(StateVector& psi, const Operation& op, std::span<const double> theta,
                            const EnergyTable* energy, double sign = 1.0) {
    const std::size_t n = psi.qubits();
    auto amp = psi.amplitudes();
    std::visit(
        [&](const auto& layer) {
            using T = std::decay_t<decltype(layer)>;
            if constexpr (std::is_same_v<T, RotationLayer>) {
                auto angles = theta.subspan(layer.first_param, n);
                if (layer.axis == Axis::Y) {
                    const auto mats = detail::rotation_mats_y(n, angles, sign);
                    kernels::apply_column(amp, n, detail::all_bits(n), std::span<const RealMat2>(mats));
                } else {
                    const auto mats = detail::rotation_mats_x(n, angles, sign);
                    kernels::apply_column(amp, n, detail::all_bits(n), std::span<const Mat2>(mats));
                }
            } else if constexpr (std::is_same_v<T, MixerLayer>) {
                const std::vector<Mat2> mats(n, rx_matrix(sign * 2.0 * theta[layer.param]));
                kernels::apply_column(amp, n, detail::all_bits(n), std::span<const Mat2>(mats));
            } else if constexpr (std::is_same_v<T, EntanglerLayer>) {
                const auto pairs = detail::to_bit_pairs(n, layer.pairs);
                kernels::apply_cz_set(amp, pairs);
            } else if constexpr (std::is_same_v<T, CostLayer>) {
                kernels::apply_diagonal_phase(amp, detail::cost_values(energy, n),
                                              sign * theta[layer.param]);
            } else {
                const std::vector<RealMat2> mats(n, hadamard_matrix());
                kernels::apply_column(amp, n, detail::all_bits(n), std::span<const RealMat2>(mats));
            }
        },
        op);
}

/// |psi(theta)> = U(theta)|0...0>.
[[nodiscard]] inline StateVector prepare(const Circuit& circuit, std::span<const double> theta,
                                         const EnergyTable* energy = nullptr) {
    detail::check_parameters(circuit, theta);
    StateVector psi(circuit.qubits());
    const auto& ops = circuit.operations();
    std::size_t start = 0;
    if (!ops.empty()) {
        if (const auto* rot = std::get_if<RotationLayer>(&ops.front()); rot && rot->axis == Axis::Y) {
            detail::product_ry_state(psi.amplitudes(), theta.subspan(rot->first_param, circuit.qubits()));
            start = 1;
        } else if (std::holds_alternative<HadamardLayer>(ops.front())) {
            psi = StateVector::uniform(circuit.qubits());
            start = 1;
        }
    }
    for (std::size_t i = start; i < ops.size(); ++i) apply_operation(psi, ops[i], theta, energy);
    return psi;
}

/// Real-arithmetic preparation for circuits with real_amplitudes(); `amp`
/// is resized to 2^n and holds the (real) amplitudes of prepare().
inline void prepare_real(const Circuit& circuit, std::span<const double> theta,
                         std::vector<double>& amp) {
    detail::check_parameters(circuit, theta);
    if (!circuit.real_amplitudes()) throw InputError("circuit has complex gates");
    const std::size_t n = circuit.qubits();
    if (n > kHardStateCap) throw CapacityError("state-vector cap exceeded");
    amp.resize(std::size_t{1} << n);
    const auto& ops = circuit.operations();
    std::size_t start = 0;
    if (const auto* rot = ops.empty() ? nullptr : std::get_if<RotationLayer>(&ops.front())) {
        detail::product_ry_state(std::span<double>(amp), theta.subspan(rot->first_param, n));
        start = 1;
    } else {
        std::fill(amp.begin(), amp.end(), 0.0);
        amp[0] = 1.0;
    }
    for (std::size_t i = start; i < ops.size(); ++i) {
        std::visit(
            [&](const auto& layer) {
                using T = std::decay_t<decltype(layer)>;
                if constexpr (std::is_same_v<T, RotationLayer>) {
                    const auto mats = detail::rotation_mats_y(n, theta.subspan(layer.first_param, n));
                    kernels::apply_column(std::span<double>(amp), n, detail::all_bits(n), mats);
                } else if constexpr (std::is_same_v<T, EntanglerLayer>) {
                    kernels::apply_cz_set(std::span<double>(amp), detail::to_bit_pairs(n, layer.pairs));
                } else if constexpr (std::is_same_v<T, HadamardLayer>) {
                    const std::vector<RealMat2> mats(n, hadamard_matrix());
                    kernels::apply_column(std::span<double>(amp), n, detail::all_bits(n), mats);
                }
            },
            ops[i]);
    }
}

/// |<x|psi(theta)>|^2 for every basis state, written into `probabilities`.
/// Uses the real-arithmetic path when the circuit allows it.
inline void prepare_probabilities(const Circuit& circuit, std::span<const double> theta,
                                  const EnergyTable* energy, std::vector<double>& probabilities) {
    if (circuit.real_amplitudes()) {
        prepare_real(circuit, theta, probabilities);
        for (auto& a : probabilities) a *= a;
        return;
    }
    const auto psi = prepare(circuit, theta, energy);
    probabilities.resize(psi.dimension());
    const auto amp = psi.amplitudes();
    for (std::size_t x = 0; x < amp.size(); ++x) probabilities[x] = std::norm(amp[x]);
}

namespace detail {

inline void apply_pauli(StateVector& psi, std::size_t qubit, unsigned which) {
    const std::size_t bit = bit_position(psi.qubits(), qubit);
    switch (which) {
        case 1: kernels::apply_pauli_x(psi.amplitudes(), bit); break;
        case 2: kernels::apply_pauli_y(psi.amplitudes(), bit); break;
        case 3: kernels::apply_pauli_z(psi.amplitudes(), bit); break;
        default: break;
    }
}

inline void single_qubit_errors(StateVector& psi, const NoiseConfig& noise, Rng& rng) {
    for (std::size_t q = 0; q < psi.qubits(); ++q) {
        if (rng.bernoulli(noise.single_qubit_rate)) {
            apply_pauli(psi, q, 1 + static_cast<unsigned>(rng.below(3)));
        }
    }
}

}  // namespace detail

/// One Monte-Carlo trajectory of the noisy circuit: after every one-qubit
/// gate a uniformly chosen Pauli strikes with probability single_qubit_rate;
/// after every CZ a uniformly chosen non-identity two-qubit Pauli strikes with
/// probability two_qubit_rate. The cost layer is treated as noiseless.
/// Readout flips are applied by the sampler, not here.
[[nodiscard]] inline StateVector prepare_noisy(const Circuit& circuit, std::span<const double> theta,
                                               const EnergyTable* energy, const NoiseConfig& noise,
                                               Rng& rng) {
    if (!noise.gate_noise()) return prepare(circuit, theta, energy);
    detail::check_parameters(circuit, theta);
    StateVector psi(circuit.qubits());
    const std::size_t n = circuit.qubits();
    for (const auto& op : circuit.operations()) {
        if (const auto* ent = std::get_if<EntanglerLayer>(&op)) {
            std::size_t begin = 0;
            for (std::size_t g = 0; g < ent->pairs.size(); ++g) {
                if (!rng.bernoulli(noise.two_qubit_rate)) continue;
                std::vector<std::pair<std::size_t, std::size_t>> segment(
                    ent->pairs.begin() + static_cast<std::ptrdiff_t>(begin),
                    ent->pairs.begin() + static_cast<std::ptrdiff_t>(g + 1));
                kernels::apply_cz_set(psi.amplitudes(), detail::to_bit_pairs(n, segment));
                const auto which = 1 + static_cast<unsigned>(rng.below(15));
                detail::apply_pauli(psi, ent->pairs[g].first, which / 4);
                detail::apply_pauli(psi, ent->pairs[g].second, which % 4);
                begin = g + 1;
            }
            std::vector<std::pair<std::size_t, std::size_t>> rest(
                ent->pairs.begin() + static_cast<std::ptrdiff_t>(begin), ent->pairs.end());
            kernels::apply_cz_set(psi.amplitudes(), detail::to_bit_pairs(n, rest));
        } else {
            apply_operation(psi, op, theta, energy);
            if (!std::holds_alternative<CostLayer>(op)) detail::single_qubit_errors(psi, noise, rng);
        }
    }
    return psi;
}

/// <psi|H|psi> for a diagonal H given as per-basis-state values.
[[nodiscard]] inline double exact_expectation(const StateVector& psi, std::span<const double> diagonal) {
    if (diagonal.size() != psi.dimension()) {
        throw DimensionError("expectation: state has dimension " + std::to_string(psi.dimension()) +
                             ", diagonal has " + std::to_string(diagonal.size()));
    }
    const auto amp = psi.amplitudes();
    double s = 0.0;
    for (std::size_t x = 0; x < amp.size(); ++x) s += std::norm(amp[x]) * diagonal[x];
    return s;
}

[[nodiscard]] inline double exact_expectation(const StateVector& psi, const EnergyTable& table) {
    return exact_expectation(psi, table.values());
}

/// Same quantity with energies computed on the fly (no table).
[[nodiscard]] inline double exact_expectation(const StateVector& psi, const LossEvaluator& evaluate) {
    if (evaluate.qubits() != psi.qubits()) throw DimensionError("expectation: qubit count mismatch");
    const auto amp = psi.amplitudes();
    double s = 0.0;
    for (std::size_t x = 0; x < amp.size(); ++x) {
        const double p = std::norm(amp[x]);
        if (p != 0.0) s += p * evaluate(x);
    }
    return s;
}

}  // namespace hqmsa
