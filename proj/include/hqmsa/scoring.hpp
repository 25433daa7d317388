#pragma once

// hqQUBO loss: SP-score resolved through per-pair weight tables queried by the
// position map, plus a quadratic letter-count penalty. The loss is a function
// of the bitstring alone, so the problem Hamiltonian is diagonal and is only
// ever held as a table of energies (or evaluated on the fly).

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "hqmsa/align_core.hpp"

namespace hqmsa {

/// -1 for identical residues, +1 otherwise.
[[nodiscard]] constexpr int similarity(Residue a, Residue b) noexcept {
    return a == b ? -1 : 1;
}

[[nodiscard]] constexpr int similarity(char a, char b) {
    return similarity(Residue(a), Residue(b));
}

/// Penalty weight p >= 0 on the squared letter-count deviation.
class PenaltyParam {
public:
    static constexpr double kDefault = 1.5;

    constexpr PenaltyParam() = default;
    explicit constexpr PenaltyParam(double value) : value_(value) {
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw InputError("penalty parameter must be finite and non-negative");
        }
    }

    [[nodiscard]] constexpr double value() const noexcept { return value_; }

private:
    double value_ = kDefault;
};

/// w(i,j)[k][l] = sim(s_i[k], s_j[l]) for every pair i < j, stored once.
class WeightDictionary {
public:
    WeightDictionary() = default;

    explicit WeightDictionary(const SequenceSet& set) : lengths_(set.lengths()) {
        const std::size_t n = set.size();
        offsets_.assign(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                offsets_[i * n + j] = table_.size();
                for (char a : set[i]) {
                    for (char b : set[j]) table_.push_back(static_cast<std::int8_t>(similarity(a, b)));
                }
            }
        }
    }

    [[nodiscard]] std::size_t sequences() const noexcept { return lengths_.size(); }
    [[nodiscard]] std::size_t length(std::size_t i) const { return lengths_.at(i); }
    [[nodiscard]] const std::vector<std::size_t>& lengths() const noexcept { return lengths_; }
    [[nodiscard]] std::size_t pair_count() const noexcept {
        return lengths_.size() * (lengths_.size() - 1) / 2;
    }

    /// Works for either order of (i, j); the reverse order reads the transpose.
    [[nodiscard]] int weight(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        if (i > j) return weight(j, i, l, k);
        return table_[offsets_[i * lengths_.size() + j] + k * lengths_[j] + l];
    }

    /// Dense copy of w(i,j) with shape length(i) x length(j).
    [[nodiscard]] std::vector<std::vector<int>> matrix(std::size_t i, std::size_t j) const {
        if (i == j || i >= sequences() || j >= sequences()) {
            throw DimensionError("weight matrix requested for invalid pair");
        }
        std::vector<std::vector<int>> m(lengths_[i], std::vector<int>(lengths_[j]));
        for (std::size_t k = 0; k < lengths_[i]; ++k) {
            for (std::size_t l = 0; l < lengths_[j]; ++l) m[k][l] = weight(i, j, k, l);
        }
        return m;
    }

private:
    std::vector<std::size_t> lengths_;
    std::vector<std::size_t> offsets_;
    std::vector<std::int8_t> table_;
};

[[nodiscard]] inline WeightDictionary build_weights(const SequenceSet& set) {
    return WeightDictionary(set);
}

/// Sum over unordered pairs i < j and columns k where both rows hold a
/// (non-overflow) letter.
[[nodiscard]] inline double sp_score(const BitAssignment& bits, const WeightDictionary& w) {
    if (bits.sequences() != w.sequences()) {
        throw DimensionError("bit assignment and weight dictionary disagree on N");
    }
    std::vector<PositionMap> f;
    f.reserve(w.sequences());
    for (std::size_t i = 0; i < w.sequences(); ++i) f.push_back(position_map(bits.row(i), w.length(i)));
    long total = 0;
    for (std::size_t i = 0; i < w.sequences(); ++i) {
        for (std::size_t j = i + 1; j < w.sequences(); ++j) {
            for (std::size_t k = 0; k < bits.columns(); ++k) {
                const int a = f[i][k];
                const int b = f[j][k];
                if (a < 0 || b < 0) continue;
                total += w.weight(i, j, static_cast<std::size_t>(a), static_cast<std::size_t>(b));
            }
        }
    }
    return static_cast<double>(total);
}

[[nodiscard]] inline double penalty(const BitAssignment& bits, std::span<const std::size_t> lengths,
                                    PenaltyParam p) {
    if (bits.sequences() != lengths.size()) {
        throw DimensionError("bit assignment and lengths disagree on N");
    }
    long sum = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const long d = static_cast<long>(bits.popcount(i)) - static_cast<long>(lengths[i]);
        sum += d * d;
    }
    return p.value() * static_cast<double>(sum);
}

[[nodiscard]] inline double loss(const BitAssignment& bits, const WeightDictionary& w,
                                 PenaltyParam p) {
    return sp_score(bits, w) + penalty(bits, w.lengths(), p);
}

/// Evaluates the loss directly on basis-state indices (bit (0,0) = MSB).
/// This is the hot path used by sampling, table construction and the oracle.
class LossEvaluator {
public:
    static constexpr std::size_t kMaxQubits = 64;

    LossEvaluator() = default;

    LossEvaluator(WeightDictionary weights, std::size_t columns, PenaltyParam p)
        : weights_(std::move(weights)), columns_(columns), penalty_(p) {
        const std::size_t n = weights_.sequences() * columns_;
        if (n == 0 || n > kMaxQubits) {
            throw CapacityError("loss evaluator supports 1..64 qubits, got " + std::to_string(n));
        }
        for (std::size_t i = 0; i < weights_.sequences(); ++i) {
            if (weights_.length(i) > columns_) {
                throw DimensionError("sequence longer than column count");
            }
        }
    }

    LossEvaluator(const SequenceSet& set, PenaltyParam p)
        : LossEvaluator(WeightDictionary(set), set.columns(), p) {}

    [[nodiscard]] std::size_t qubits() const noexcept { return weights_.sequences() * columns_; }
    [[nodiscard]] std::size_t sequences() const noexcept { return weights_.sequences(); }
    [[nodiscard]] std::size_t columns() const noexcept { return columns_; }
    [[nodiscard]] PenaltyParam penalty_param() const noexcept { return penalty_; }
    [[nodiscard]] const WeightDictionary& weights() const noexcept { return weights_; }

    [[nodiscard]] std::uint64_t row_bits(std::uint64_t index, std::size_t i) const noexcept {
        const std::size_t shift = (sequences() - 1 - i) * columns_;
        const std::uint64_t mask =
            columns_ >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << columns_) - 1);
        return (index >> shift) & mask;
    }

    [[nodiscard]] bool feasible(std::uint64_t index) const noexcept {
        for (std::size_t i = 0; i < sequences(); ++i) {
            if (static_cast<std::size_t>(std::popcount(row_bits(index, i))) != weights_.length(i)) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] double sp_score(std::uint64_t index) const noexcept {
        std::array<std::int8_t, kMaxQubits> f{};
        const std::size_t nseq = sequences();
        for (std::size_t i = 0; i < nseq; ++i) {
            const std::uint64_t r = row_bits(index, i);
            const std::size_t len = weights_.length(i);
            std::size_t placed = 0;
            for (std::size_t k = 0; k < columns_; ++k) {
                std::int8_t v = -1;
                if ((r >> (columns_ - 1 - k)) & 1U) {
                    ++placed;
                    if (placed <= len) v = static_cast<std::int8_t>(placed - 1);
                }
                f[i * columns_ + k] = v;
            }
        }
        long total = 0;
        for (std::size_t i = 0; i < nseq; ++i) {
            for (std::size_t j = i + 1; j < nseq; ++j) {
                for (std::size_t k = 0; k < columns_; ++k) {
                    const int a = f[i * columns_ + k];
                    const int b = f[j * columns_ + k];
                    if ((a | b) < 0) continue;
                    total += weights_.weight(i, j, static_cast<std::size_t>(a),
                                             static_cast<std::size_t>(b));
                }
            }
        }
        return static_cast<double>(total);
    }

    [[nodiscard]] double penalty(std::uint64_t index) const noexcept {
        long sum = 0;
        for (std::size_t i = 0; i < sequences(); ++i) {
            const long d = static_cast<long>(std::popcount(row_bits(index, i))) -
                           static_cast<long>(weights_.length(i));
            sum += d * d;
        }
        return penalty_.value() * static_cast<double>(sum);
    }

    [[nodiscard]] double operator()(std::uint64_t index) const noexcept {
        return sp_score(index) + penalty(index);
    }

private:
    WeightDictionary weights_;
    std::size_t columns_ = 0;
    PenaltyParam penalty_;
};

inline constexpr std::size_t kDefaultEnumerationCap = 24;

/// Dense diagonal of the problem Hamiltonian, indexed by basis state.
class EnergyTable {
public:
    EnergyTable() = default;
    EnergyTable(std::size_t qubits, std::vector<double> energies)
        : qubits_(qubits), energies_(std::move(energies)) {
        if (energies_.size() != (std::size_t{1} << qubits_)) {
            throw DimensionError("energy table size does not match 2^n");
        }
    }

    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return energies_.size(); }
    [[nodiscard]] double operator[](std::uint64_t index) const { return energies_[index]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return energies_; }

    [[nodiscard]] double min() const noexcept {
        double m = std::numeric_limits<double>::infinity();
        for (double e : energies_) m = std::min(m, e);
        return m;
    }

    /// Copy with every energy shifted by `c`.
    [[nodiscard]] EnergyTable shifted(double c) const {
        auto e = energies_;
        for (auto& v : e) v += c;
        return {qubits_, std::move(e)};
    }

private:
    std::size_t qubits_ = 0;
    std::vector<double> energies_;
};

template <class Evaluator>
[[nodiscard]] EnergyTable build_energy_table(const Evaluator& evaluate, std::size_t qubits,
                                             std::size_t cap = kDefaultEnumerationCap) {
    if (qubits > cap) {
        throw CapacityError(std::to_string(qubits) + " qubits exceeds the enumeration cap of " +
                            std::to_string(cap) +
                            "; evaluate bitstrings on the fly with LossEvaluator instead");
    }
    const std::size_t dim = std::size_t{1} << qubits;
    std::vector<double> energies(dim);
    for (std::size_t x = 0; x < dim; ++x) energies[x] = evaluate(static_cast<std::uint64_t>(x));
    return {qubits, std::move(energies)};
}

[[nodiscard]] inline EnergyTable build_energy_table(const LossEvaluator& evaluator,
                                                    std::size_t cap = kDefaultEnumerationCap) {
    return build_energy_table(evaluator, evaluator.qubits(), cap);
}

[[nodiscard]] inline std::string bitstring(std::uint64_t index, std::size_t qubits) {
    std::string s(qubits, '0');
    for (std::size_t q = 0; q < qubits; ++q) {
        if ((index >> (qubits - 1 - q)) & 1U) s[q] = '1';
    }
    return s;
}

/// CSV with header `index,bitstring,energy`.
inline void write_energy_table_csv(std::ostream& out, const EnergyTable& table) {
    out << "index,bitstring,energy\n";
    for (std::size_t x = 0; x < table.size(); ++x) {
        out << x << ',' << bitstring(x, table.qubits()) << ',' << table[x] << '\n';
    }
}

/// Binary layout: "HQET", uint32 version (1), uint32 qubit count, then 2^n
/// IEEE-754 doubles in host byte order.
inline void write_energy_table_binary(std::ostream& out, const EnergyTable& table) {
    const std::uint32_t version = 1;
    const auto n = static_cast<std::uint32_t>(table.qubits());
    out.write("HQET", 4);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(table.values().data()),
              static_cast<std::streamsize>(table.size() * sizeof(double)));
}

[[nodiscard]] inline EnergyTable read_energy_table_binary(std::istream& in) {
    char magic[4];
    std::uint32_t version = 0;
    std::uint32_t n = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || std::memcmp(magic, "HQET", 4) != 0 || version != 1 || n > 40) {
        throw IoError("not an energy table file");
    }
    std::vector<double> e(std::size_t{1} << n);
    in.read(reinterpret_cast<char*>(e.data()), static_cast<std::streamsize>(e.size() * sizeof(double)));
    if (!in) throw IoError("truncated energy table file");
    return {n, std::move(e)};
}

}  // namespace hqmsa
