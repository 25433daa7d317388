#pragma once

// Dense state vector and the in-place gate kernels that act on it.
//
// Qubit q is register position q (q = 0 is the leftmost symbol of a ket) and
// lives at bit position n-1-q of the basis index, matching BitAssignment.
// Kernels below take *bit positions*.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hqmsa/error.hpp"

namespace hqmsa {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kDefaultStateCap = 24;
inline constexpr std::size_t kHardStateCap = 30;

[[nodiscard]] constexpr std::size_t bit_position(std::size_t qubits, std::size_t qubit) noexcept {
    return qubits - 1 - qubit;
}

/// 2x2 operator with complex entries, row-major.
struct Mat2 {
    Amplitude m00, m01, m10, m11;
};

/// 2x2 operator with real entries; acting on complex amplitudes it treats the
/// real and imaginary lanes identically, which vectorizes cleanly.
struct RealMat2 {
    double m00, m01, m10, m11;
};

/// exp(-i theta Y / 2)
[[nodiscard]] inline RealMat2 ry_matrix(double theta) noexcept {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    return {c, -s, s, c};
}

/// exp(-i theta X / 2)
[[nodiscard]] inline Mat2 rx_matrix(double theta) noexcept {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    return {{c, 0.0}, {0.0, -s}, {0.0, -s}, {c, 0.0}};
}

/// exp(-i theta Z / 2)
[[nodiscard]] inline Mat2 rz_matrix(double theta) noexcept {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    return {{c, -s}, {0.0, 0.0}, {0.0, 0.0}, {c, s}};
}

[[nodiscard]] inline RealMat2 hadamard_matrix() noexcept {
    const double h = 1.0 / std::sqrt(2.0);
    return {h, h, h, -h};
}

class StateVector {
public:
    StateVector() = default;

    /// |0...0> on `qubits` qubits.
    explicit StateVector(std::size_t qubits, std::size_t cap = kDefaultStateCap)
        : qubits_(qubits) {
        if (qubits == 0) throw DimensionError("state vector needs at least one qubit");
        if (qubits > std::min(cap, kHardStateCap)) {
            throw CapacityError(std::to_string(qubits) + " qubits exceeds the state-vector cap of " +
                                std::to_string(std::min(cap, kHardStateCap)));
        }
        amplitudes_.assign(std::size_t{1} << qubits, Amplitude{});
        amplitudes_[0] = 1.0;
    }

    static StateVector basis(std::size_t qubits, std::uint64_t index) {
        StateVector s(qubits);
        if (index >= s.dimension()) throw DimensionError("basis index out of range");
        s.amplitudes_[0] = 0.0;
        s.amplitudes_[index] = 1.0;
        return s;
    }

    static StateVector uniform(std::size_t qubits) {
        StateVector s(qubits);
        const double a = 1.0 / std::sqrt(static_cast<double>(s.dimension()));
        std::fill(s.amplitudes_.begin(), s.amplitudes_.end(), Amplitude{a, 0.0});
        return s;
    }

    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes) {
        if (amplitudes.empty() || !std::has_single_bit(amplitudes.size())) {
            throw DimensionError("amplitude count must be a power of two");
        }
        StateVector s;
        s.qubits_ = static_cast<std::size_t>(std::countr_zero(amplitudes.size()));
        s.amplitudes_ = std::move(amplitudes);
        return s;
    }

    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<Amplitude> amplitudes() noexcept { return amplitudes_; }
    [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] Amplitude operator[](std::uint64_t i) const { return amplitudes_[i]; }
    [[nodiscard]] Amplitude& operator[](std::uint64_t i) { return amplitudes_[i]; }

    [[nodiscard]] double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto& a : amplitudes_) s += std::norm(a);
        return s;
    }

    [[nodiscard]] double probability(std::uint64_t i) const { return std::norm(amplitudes_[i]); }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amplitudes_.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitudes_[i]);
        return p;
    }

    void normalize() {
        const double n = std::sqrt(norm_squared());
        if (n == 0.0) throw DimensionError("cannot normalize the zero vector");
        for (auto& a : amplitudes_) a /= n;
    }

private:
    std::size_t qubits_ = 0;
    std::vector<Amplitude> amplitudes_;
};

[[nodiscard]] inline Amplitude inner_product(const StateVector& a, const StateVector& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("inner product of unequal dimensions");
    Amplitude s{};
    for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

namespace kernels {

inline constexpr std::size_t kBlockBits = 12;  // 2^12 doubles = 32 KiB
inline constexpr std::size_t kTileWidth = 512; // doubles per tile row

/// Visits every amplitude pair (i, i | 1<<b) for each bit b set in `active`,
/// in cache-friendly order: low bits block by block, then high bits tile by
/// tile. `op(b, i0, i1, count)` handles `count` consecutive pairs starting at
/// (i0, i1). Operations on different bits must commute.
template <class PairOp>
void for_each_pair_tiled(std::size_t nbits, std::uint64_t active, PairOp&& op) {
    const std::size_t dim = std::size_t{1} << nbits;
    const std::size_t low_bits = std::min(nbits, kBlockBits);
    const std::size_t block = std::size_t{1} << low_bits;
    const std::uint64_t low_mask = (std::uint64_t{1} << low_bits) - 1;

    if (active & low_mask) {
        for (std::size_t start = 0; start < dim; start += block) {
            for (std::size_t b = 0; b < low_bits; ++b) {
                if (!((active >> b) & 1U)) continue;
                const std::size_t s = std::size_t{1} << b;
                for (std::size_t base = start; base < start + block; base += 2 * s) {
                    op(b, base, base + s, s);
                }
            }
        }
    }
    if (nbits <= low_bits || !(active & ~low_mask)) return;

    const std::size_t width = std::min(block, kTileWidth);
    for (std::size_t l0 = 0; l0 < block; l0 += width) {
        for (std::size_t b = low_bits; b < nbits; ++b) {
            if (!((active >> b) & 1U)) continue;
            const std::size_t s = std::size_t{1} << b;
            for (std::size_t base = 0; base < dim; base += 2 * s) {
                for (std::size_t off = base; off < base + s; off += block) {
                    op(b, off + l0, off + s + l0, width);
                }
            }
        }
    }
}

inline void apply_real_pairs(double* __restrict x, double* __restrict y, std::size_t len,
                             const RealMat2& m) noexcept {
    for (std::size_t t = 0; t < len; ++t) {
        const double u = x[t];
        const double v = y[t];
        x[t] = m.m00 * u + m.m01 * v;
        y[t] = m.m10 * u + m.m11 * v;
    }
}

/// y = K x on every consecutive group of 8 doubles (K row-major 8x8).
inline void apply_octets(double* __restrict x, std::size_t len, const double* __restrict k) noexcept {
    for (std::size_t g = 0; g < len; g += 8) {
        double in[8];
        double out[8];
        for (int j = 0; j < 8; ++j) in[j] = x[g + j];
        for (int i = 0; i < 8; ++i) {
            double s = 0.0;
            for (int j = 0; j < 8; ++j) s += k[8 * i + j] * in[j];
            out[i] = s;
        }
        for (int i = 0; i < 8; ++i) x[g + i] = out[i];
    }
}

[[nodiscard]] inline double entry(const RealMat2& m, unsigned r, unsigned c) noexcept {
    return r ? (c ? m.m11 : m.m10) : (c ? m.m01 : m.m00);
}

/// Rotates bits lo (stride between x0/x1) and hi (stride x0/x2) together:
/// x0..x3 hold the 00, 01, 10, 11 components of `len` amplitude groups.
inline void apply_real_quads(double* __restrict x0, double* __restrict x1, double* __restrict x2,
                             double* __restrict x3, std::size_t len, const RealMat2& lo,
                             const RealMat2& hi) noexcept {
    for (std::size_t t = 0; t < len; ++t) {
        const double a0 = lo.m00 * x0[t] + lo.m01 * x1[t];
        const double a1 = lo.m10 * x0[t] + lo.m11 * x1[t];
        const double a2 = lo.m00 * x2[t] + lo.m01 * x3[t];
        const double a3 = lo.m10 * x2[t] + lo.m11 * x3[t];
        x0[t] = hi.m00 * a0 + hi.m01 * a2;
        x2[t] = hi.m10 * a0 + hi.m11 * a2;
        x1[t] = hi.m00 * a1 + hi.m01 * a3;
        x3[t] = hi.m10 * a1 + hi.m11 * a3;
    }
}

namespace detail {

/// Groups the set bits of `active` within [from, to) into pairs (a lone
/// last bit is paired with itself as a marker).
inline std::vector<std::pair<std::size_t, std::size_t>> bit_pairs_in(std::uint64_t active, std::size_t from,
                                                                     std::size_t to) {
    std::vector<std::size_t> bits;
    for (std::size_t b = from; b < to; ++b) {
        if ((active >> b) & 1U) bits.push_back(b);
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < bits.size(); i += 2) {
        out.emplace_back(bits[i], i + 1 < bits.size() ? bits[i + 1] : bits[i]);
    }
    return out;
}

}  // namespace detail

/// Applies `mats[b]` to every bit b set in `active` of a real array of
/// 2^nbits doubles. Bits 0..2 are fused into one 8x8 pass; the remaining
/// bits are applied two at a time.
inline void apply_real_column(double* x, std::size_t nbits, std::uint64_t active,
                              std::span<const RealMat2> mats) {
    const std::size_t dim = std::size_t{1} << nbits;
    if (nbits < 3) {
        for (std::size_t b = 0; b < nbits; ++b) {
            if (!((active >> b) & 1U)) continue;
            const std::size_t s = std::size_t{1} << b;
            for (std::size_t base = 0; base < dim; base += 2 * s) apply_real_pairs(x + base, x + base + s, s, mats[b]);
        }
        return;
    }
    const std::size_t low_bits = std::min(nbits, kBlockBits);
    const std::size_t block = std::size_t{1} << low_bits;
    const std::uint64_t low_mask = (std::uint64_t{1} << low_bits) - 1;

    double k[64];
    const bool octets = (active & 7U) != 0;
    if (octets) {
        constexpr RealMat2 identity{1.0, 0.0, 0.0, 1.0};
        const RealMat2 m0 = (active & 1U) ? mats[0] : identity;
        const RealMat2 m1 = (active & 2U) ? mats[1] : identity;
        const RealMat2 m2 = (active & 4U) ? mats[2] : identity;
        for (unsigned i = 0; i < 8; ++i) {
            for (unsigned j = 0; j < 8; ++j) {
                k[8 * i + j] = entry(m0, i & 1U, j & 1U) * entry(m1, (i >> 1) & 1U, (j >> 1) & 1U) *
                               entry(m2, (i >> 2) & 1U, (j >> 2) & 1U);
            }
        }
    }
    // bits a <= b over [begin, end); every `stride` doubles only `run`
    // entries starting at `lane` are touched (the current tile)
    auto apply_group = [&](std::size_t a, std::size_t b, std::size_t begin, std::size_t end,
                           std::size_t stride, std::size_t run, std::size_t lane) {
        const std::size_t sa = std::size_t{1} << a;
        if (a == b) {
            for (std::size_t base = begin; base < end; base += 2 * sa) {
                for (std::size_t off = base; off < base + sa; off += stride) {
                    apply_real_pairs(x + off + lane, x + off + sa + lane, std::min(run, sa), mats[a]);
                }
            }
            return;
        }
        const std::size_t sb = std::size_t{1} << b;
        for (std::size_t hb = begin; hb < end; hb += 2 * sb) {
            for (std::size_t base = hb; base < hb + sb; base += 2 * sa) {
                for (std::size_t off = base; off < base + sa; off += stride) {
                    apply_real_quads(x + off + lane, x + off + sa + lane, x + off + sb + lane,
                                     x + off + sa + sb + lane, std::min(run, sa), mats[a], mats[b]);
                }
            }
        }
    };
    if (active & low_mask) {
        const auto groups = detail::bit_pairs_in(active, 3, low_bits);
        for (std::size_t start = 0; start < dim; start += block) {
            if (octets) apply_octets(x + start, block, k);
            for (auto [a, b] : groups) apply_group(a, b, start, start + block, block, block, 0);
        }
    }
    if (nbits <= low_bits || !(active & ~low_mask)) return;
    const std::size_t width = std::min(block, kTileWidth);
    const auto groups = detail::bit_pairs_in(active, low_bits, nbits);
    for (std::size_t l0 = 0; l0 < block; l0 += width) {
        for (auto [a, b] : groups) apply_group(a, b, 0, dim, block, width, l0);
    }
}

/// Real-coefficient column on complex amplitudes: the real and imaginary
/// lanes become an extra, never-rotated lowest bit.
inline void apply_column(std::span<Amplitude> amp, std::size_t nbits, std::uint64_t active,
                         std::span<const RealMat2> mats) {
    std::vector<RealMat2> shifted(nbits + 1, RealMat2{1.0, 0.0, 0.0, 1.0});
    for (std::size_t b = 0; b < nbits; ++b) shifted[b + 1] = mats[b];
    apply_real_column(reinterpret_cast<double*>(amp.data()), nbits + 1, active << 1, shifted);
}

inline void apply_column(std::span<double> amp, std::size_t nbits, std::uint64_t active,
                         std::span<const RealMat2> mats) {
    apply_real_column(amp.data(), nbits, active, mats);
}

[[nodiscard]] inline Amplitude cmul(Amplitude a, Amplitude b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline void apply_complex_pairs(Amplitude* __restrict a, Amplitude* __restrict c, std::size_t count,
                                const Mat2& m) noexcept {
    for (std::size_t t = 0; t < count; ++t) {
        const Amplitude u = a[t];
        const Amplitude v = c[t];
        a[t] = cmul(m.m00, u) + cmul(m.m01, v);
        c[t] = cmul(m.m10, u) + cmul(m.m11, v);
    }
}

inline void apply_column(std::span<Amplitude> amp, std::size_t nbits, std::uint64_t active,
                         std::span<const Mat2> mats) {
    Amplitude* p = amp.data();
    for_each_pair_tiled(nbits, active, [&](std::size_t b, std::size_t i0, std::size_t i1,
                                           std::size_t count) {
        apply_complex_pairs(p + i0, p + i1, count, mats[b]);
    });
}

inline void apply_single(std::span<Amplitude> amp, std::size_t nbits, std::size_t bit,
                         const Mat2& m) {
    std::vector<Mat2> mats(nbits, m);
    apply_column(amp, nbits, std::uint64_t{1} << bit, std::span<const Mat2>(mats));
}

template <class T>
void apply_pauli_x(std::span<T> amp, std::size_t bit) noexcept {
    const std::size_t s = std::size_t{1} << bit;
    for (std::size_t base = 0; base < amp.size(); base += 2 * s) {
        for (std::size_t i = base; i < base + s; ++i) std::swap(amp[i], amp[i + s]);
    }
}

template <class T>
void apply_pauli_z(std::span<T> amp, std::size_t bit) noexcept {
    const std::size_t s = std::size_t{1} << bit;
    for (std::size_t base = 0; base < amp.size(); base += 2 * s) {
        for (std::size_t i = base + s; i < base + 2 * s; ++i) amp[i] = -amp[i];
    }
}

/// Y = [[0, -i], [i, 0]]
inline void apply_pauli_y(std::span<Amplitude> amp, std::size_t bit) noexcept {
    const std::size_t s = std::size_t{1} << bit;
    for (std::size_t base = 0; base < amp.size(); base += 2 * s) {
        for (std::size_t i = base; i < base + s; ++i) {
            const Amplitude a0 = amp[i];
            const Amplitude a1 = amp[i + s];
            amp[i] = {a1.imag(), -a1.real()};
            amp[i + s] = {-a0.imag(), a0.real()};
        }
    }
}

/// Product of controlled-Z gates over bit-position pairs. The CZs commute, so
/// the set is one diagonal sign pass. The sign factorizes over a high/low
/// split of the index: pairs inside either half use a parity table, pairs
/// that straddle the split select one of a few low-half sign tables.
template <class T>
void apply_cz_set(std::span<T> amp, std::span<const std::pair<std::size_t, std::size_t>> pairs) {
    if (pairs.empty()) return;
    const std::size_t nbits = static_cast<std::size_t>(std::countr_zero(amp.size()));
    const std::size_t lo_bits = nbits / 2;
    const std::size_t lo_size = std::size_t{1} << lo_bits;
    const std::size_t hi_size = amp.size() >> lo_bits;

    std::vector<std::uint8_t> lo_par(lo_size, 0);
    std::vector<std::uint8_t> hi_par(hi_size, 0);
    std::vector<std::pair<std::size_t, std::size_t>> cross;  // (hi bit, lo bit)
    for (auto [a, b] : pairs) {
        const std::size_t lo = std::min(a, b);
        const std::size_t hi = std::max(a, b);
        if (hi < lo_bits) {
            for (std::size_t x = 0; x < lo_size; ++x) lo_par[x] ^= ((x >> lo) & (x >> hi) & 1U);
        } else if (lo >= lo_bits) {
            for (std::size_t x = 0; x < hi_size; ++x) {
                hi_par[x] ^= ((x >> (lo - lo_bits)) & (x >> (hi - lo_bits)) & 1U);
            }
        } else {
            cross.emplace_back(hi - lo_bits, lo);
        }
    }
    std::vector<std::pair<std::uint64_t, std::vector<double>>> tables;
    auto table_for = [&](std::uint64_t cm) -> const std::vector<double>& {
        for (const auto& [key, t] : tables) {
            if (key == cm) return t;
        }
        std::vector<double> t(lo_size);
        for (std::size_t x = 0; x < lo_size; ++x) {
            const unsigned par = lo_par[x] ^ (static_cast<unsigned>(std::popcount(x & cm)) & 1U);
            t[x] = par ? -1.0 : 1.0;
        }
        tables.emplace_back(cm, std::move(t));
        return tables.back().second;
    };
    for (std::size_t h = 0; h < hi_size; ++h) {
        std::uint64_t cm = 0;
        for (auto [hb, lb] : cross) {
            if ((h >> hb) & 1U) cm ^= std::uint64_t{1} << lb;
        }
        const double* t = table_for(cm).data();
        const double s = hi_par[h] ? -1.0 : 1.0;
        T* row = amp.data() + (h << lo_bits);
        for (std::size_t l = 0; l < lo_size; ++l) row[l] *= s * t[l];
    }
}

/// amp[x] *= exp(-i * gamma * energy[x])
inline void apply_diagonal_phase(std::span<Amplitude> amp, std::span<const double> energy,
                                 double gamma) {
    if (amp.size() != energy.size()) throw DimensionError("diagonal phase: size mismatch");
    for (std::size_t x = 0; x < amp.size(); ++x) {
        const double phi = -gamma * energy[x];
        amp[x] = cmul(amp[x], Amplitude{std::cos(phi), std::sin(phi)});
    }
}

}  // namespace kernels

}  // namespace hqmsa
