#pragma once

// Sequences, alignments and the hybrid query encoding: one bit per
// (sequence, column), set when a letter occupies that column. Letter
// identity is never stored in the bits; it is recovered by querying the
// original sequence through the prefix-sum position map.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hqmsa/error.hpp"

namespace hqmsa {

inline constexpr std::string_view kAlphabet = "ARNDCQEGHILKMFPSTWYV";
inline constexpr char kGap = '_';

[[nodiscard]] constexpr bool is_residue(char c) noexcept {
    return kAlphabet.find(c) != std::string_view::npos;
}

/// One amino-acid letter. The gap symbol is deliberately not representable.
class Residue {
public:
    explicit constexpr Residue(char symbol) : symbol_(symbol) {
        if (!is_residue(symbol)) {
            throw InputError(std::string("not an amino-acid residue: '") + symbol + "'");
        }
    }

    [[nodiscard]] constexpr char symbol() const noexcept { return symbol_; }
    friend constexpr bool operator==(Residue, Residue) = default;

private:
    char symbol_;
};

/// The N input sequences plus the padded column count L (qubits per row).
class SequenceSet {
public:
    SequenceSet() = default;

    /// `columns` defaults to the longest sequence length.
    explicit SequenceSet(std::vector<std::string> sequences,
                         std::optional<std::size_t> columns = std::nullopt,
                         std::optional<std::size_t> reference = std::nullopt)
        : sequences_(std::move(sequences)), reference_(reference) {
        if (sequences_.empty()) throw InputError("sequence set is empty");
        std::size_t longest = 0;
        for (std::size_t i = 0; i < sequences_.size(); ++i) {
            const auto& s = sequences_[i];
            if (s.empty()) throw InputError("sequence " + std::to_string(i) + " is empty");
            for (char c : s) {
                if (!is_residue(c)) {
                    throw InputError("sequence " + std::to_string(i) +
                                     " contains non-residue character '" + std::string(1, c) + "'");
                }
            }
            longest = std::max(longest, s.size());
        }
        columns_ = columns.value_or(longest);
        if (columns_ < longest) {
            throw DimensionError("column count " + std::to_string(columns_) +
                                 " is shorter than the longest sequence (" +
                                 std::to_string(longest) + ")");
        }
        if (reference_ && *reference_ >= sequences_.size()) {
            throw InputError("reference index out of range");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return sequences_.size(); }
    [[nodiscard]] std::size_t columns() const noexcept { return columns_; }
    [[nodiscard]] std::size_t qubits() const noexcept { return sequences_.size() * columns_; }
    [[nodiscard]] const std::string& operator[](std::size_t i) const { return sequences_.at(i); }
    [[nodiscard]] std::size_t length(std::size_t i) const { return sequences_.at(i).size(); }
    [[nodiscard]] const std::vector<std::string>& sequences() const noexcept { return sequences_; }
    [[nodiscard]] std::optional<std::size_t> reference() const noexcept { return reference_; }

    [[nodiscard]] std::vector<std::size_t> lengths() const {
        std::vector<std::size_t> out;
        out.reserve(sequences_.size());
        for (const auto& s : sequences_) out.push_back(s.size());
        return out;
    }

private:
    std::vector<std::string> sequences_;
    std::size_t columns_ = 0;
    std::optional<std::size_t> reference_;
};

/// N*L bits laid out sequence-major. When read as an integer, bit (0,0) is
/// the most significant bit, so the ket |b(0,0) b(0,1) ... b(N-1,L-1)> reads
/// left to right.
class BitAssignment {
public:
    BitAssignment() = default;

    BitAssignment(std::size_t sequences, std::size_t columns)
        : sequences_(sequences), columns_(columns), bits_(sequences * columns, 0) {}

    BitAssignment(std::size_t sequences, std::size_t columns, std::vector<std::uint8_t> bits)
        : sequences_(sequences), columns_(columns), bits_(std::move(bits)) {
        if (bits_.size() != sequences_ * columns_) {
            throw DimensionError("bit count " + std::to_string(bits_.size()) + " != N*L = " +
                                 std::to_string(sequences_ * columns_));
        }
        for (auto& b : bits_) {
            if (b > 1) throw InputError("bit values must be 0 or 1");
        }
    }

    /// Parses '0'/'1' characters; spaces and '|' separators are skipped.
    static BitAssignment from_string(std::string_view text, std::size_t sequences,
                                     std::size_t columns) {
        std::vector<std::uint8_t> bits;
        for (char c : text) {
            if (c == '0' || c == '1') {
                bits.push_back(static_cast<std::uint8_t>(c - '0'));
            } else if (c != ' ' && c != '|') {
                throw InputError(std::string("invalid bit character '") + c + "'");
            }
        }
        return {sequences, columns, std::move(bits)};
    }

    static BitAssignment from_index(std::uint64_t index, std::size_t sequences,
                                    std::size_t columns) {
        const std::size_t n = sequences * columns;
        if (n > 64) throw CapacityError("basis index limited to 64 qubits");
        std::vector<std::uint8_t> bits(n);
        for (std::size_t q = 0; q < n; ++q) bits[q] = (index >> (n - 1 - q)) & 1U;
        return {sequences, columns, std::move(bits)};
    }

    [[nodiscard]] std::uint64_t index() const {
        if (bits_.size() > 64) throw CapacityError("basis index limited to 64 qubits");
        std::uint64_t x = 0;
        for (auto b : bits_) x = (x << 1) | b;
        return x;
    }

    [[nodiscard]] std::size_t sequences() const noexcept { return sequences_; }
    [[nodiscard]] std::size_t columns() const noexcept { return columns_; }
    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }

    [[nodiscard]] bool operator()(std::size_t i, std::size_t k) const {
        return bits_[i * columns_ + k] != 0;
    }
    void set(std::size_t i, std::size_t k, bool value) {
        bits_.at(i * columns_ + k) = value ? 1 : 0;
    }

    [[nodiscard]] std::span<const std::uint8_t> row(std::size_t i) const {
        return std::span<const std::uint8_t>(bits_).subspan(i * columns_, columns_);
    }
    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    [[nodiscard]] std::size_t popcount(std::size_t i) const {
        auto r = row(i);
        return static_cast<std::size_t>(std::count(r.begin(), r.end(), std::uint8_t{1}));
    }

    [[nodiscard]] std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    friend bool operator==(const BitAssignment&, const BitAssignment&) = default;

private:
    std::size_t sequences_ = 0;
    std::size_t columns_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// f_i over the L columns: -1 for a gap or an over-count bit, otherwise the
/// 0-based letter order within the original sequence.
using PositionMap = std::vector<int>;

/// Gapped rows of length L over the alphabet plus '_'.
struct AlignmentView {
    std::vector<std::string> rows;

    friend bool operator==(const AlignmentView&, const AlignmentView&) = default;
};

[[nodiscard]] inline PositionMap position_map(std::span<const std::uint8_t> row,
                                              std::size_t length) {
    PositionMap f(row.size(), -1);
    std::size_t placed = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] == 0) continue;
        ++placed;
        if (placed <= length) f[k] = static_cast<int>(placed) - 1;
    }
    return f;
}

[[nodiscard]] inline PositionMap position_map(const SequenceSet& set, std::size_t i,
                                              const BitAssignment& bits) {
    if (i >= set.size() || i >= bits.sequences()) {
        throw DimensionError("sequence index " + std::to_string(i) + " out of range");
    }
    return position_map(bits.row(i), set.length(i));
}

/// Rows must all have length `columns`; letters map to 1, gaps to 0.
[[nodiscard]] inline BitAssignment encode(const AlignmentView& view, std::size_t columns) {
    BitAssignment bits(view.rows.size(), columns);
    for (std::size_t i = 0; i < view.rows.size(); ++i) {
        const auto& row = view.rows[i];
        if (row.size() != columns) {
            throw DimensionError("alignment row " + std::to_string(i) + " has length " +
                                 std::to_string(row.size()) + ", expected " +
                                 std::to_string(columns));
        }
        for (std::size_t k = 0; k < columns; ++k) {
            const char c = row[k];
            if (c == kGap) continue;
            if (!is_residue(c)) {
                throw InputError(std::string("invalid alignment character '") + c + "'");
            }
            bits.set(i, k, true);
        }
    }
    return bits;
}

[[nodiscard]] inline BitAssignment encode(const AlignmentView& view) {
    if (view.rows.empty()) throw DimensionError("alignment has no rows");
    return encode(view, view.rows.front().size());
}

/// Over-count bits render as gaps; the decoder accepts any bitstring.
[[nodiscard]] inline AlignmentView decode(const BitAssignment& bits, const SequenceSet& set) {
    if (bits.sequences() != set.size()) {
        throw DimensionError("bit assignment has " + std::to_string(bits.sequences()) +
                             " rows, sequence set has " + std::to_string(set.size()));
    }
    AlignmentView view;
    view.rows.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto f = position_map(bits.row(i), set.length(i));
        std::string row(bits.columns(), kGap);
        for (std::size_t k = 0; k < f.size(); ++k) {
            if (f[k] >= 0) row[k] = set[i][static_cast<std::size_t>(f[k])];
        }
        view.rows.push_back(std::move(row));
    }
    return view;
}

/// Letter count conserved in every row.
[[nodiscard]] inline bool is_feasible(const BitAssignment& bits, const SequenceSet& set) {
    if (bits.sequences() != set.size()) return false;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (bits.popcount(i) != set.length(i)) return false;
    }
    return true;
}

}  // namespace hqmsa
