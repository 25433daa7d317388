#pragma once

// An MSA instance ready for the variational loop: sequences, penalty, the
// loss evaluator, and (below the enumeration cap) the dense energy table.
//
// With the reference clamp on, the reference row is fixed to all-ones and
// removed from the register; "register" indices then cover the remaining
// rows and are expanded back to full N*L-bit indices for scoring and output.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hqmsa/align_core.hpp"
#include "hqmsa/cvar.hpp"
#include "hqmsa/error.hpp"
#include "hqmsa/sampling.hpp"
#include "hqmsa/scoring.hpp"

namespace hqmsa {

class Problem {
public:
    Problem(SequenceSet set, PenaltyParam p, bool clamp_reference = false,
            std::size_t enumeration_cap = kDefaultEnumerationCap)
        : set_(std::move(set)), penalty_(p), evaluate_(set_, p) {
        if (clamp_reference) {
            if (!set_.reference()) throw ConfigError("clamp_reference", "needs a reference sequence");
            const auto ref = *set_.reference();
            if (set_.length(ref) != set_.columns()) {
                throw ConfigError("clamp_reference", "reference length must equal the column count L");
            }
            if (set_.size() < 2) throw ConfigError("clamp_reference", "needs at least two sequences");
            clamped_ = ref;
        }
        if (register_qubits() <= enumeration_cap) {
            table_ = build_energy_table([this](std::uint64_t x) { return evaluate_(expand(x)); },
                                        register_qubits(), enumeration_cap);
            levels_ = EnergyLevels(*table_);
        }
    }

    [[nodiscard]] const SequenceSet& sequences() const noexcept { return set_; }
    [[nodiscard]] PenaltyParam penalty() const noexcept { return penalty_; }
    [[nodiscard]] const LossEvaluator& evaluator() const noexcept { return evaluate_; }
    [[nodiscard]] std::optional<std::size_t> clamped_row() const noexcept { return clamped_; }

    [[nodiscard]] std::size_t full_qubits() const noexcept { return set_.qubits(); }
    [[nodiscard]] std::size_t register_qubits() const noexcept {
        return clamped_ ? set_.qubits() - set_.columns() : set_.qubits();
    }

    [[nodiscard]] bool has_table() const noexcept { return table_.has_value(); }
    [[nodiscard]] const EnergyTable& table() const {
        if (!table_) throw CapacityError("energy table not built: register exceeds the enumeration cap");
        return *table_;
    }
    [[nodiscard]] const EnergyLevels& levels() const {
        if (!table_) throw CapacityError("energy table not built: register exceeds the enumeration cap");
        return levels_;
    }

    /// Register index -> full N*L-bit basis index.
    [[nodiscard]] std::uint64_t expand(std::uint64_t x) const noexcept {
        if (!clamped_) return x;
        const std::size_t L = set_.columns();
        const std::size_t below = (set_.size() - 1 - *clamped_) * L;  // bits of rows after the reference
        const std::uint64_t low = below == 0 ? 0 : (x & ((std::uint64_t{1} << below) - 1));
        const std::uint64_t high = below >= 64 ? 0 : (x >> below);
        const std::uint64_t ones = (std::uint64_t{1} << L) - 1;
        return (((high << L) | ones) << below) | low;
    }

    /// Loss of a register index.
    [[nodiscard]] double energy(std::uint64_t x) const {
        return table_ ? (*table_)[x] : evaluate_(expand(x));
    }
    [[nodiscard]] bool feasible(std::uint64_t x) const { return evaluate_.feasible(expand(x)); }
    [[nodiscard]] std::string bitstring(std::uint64_t x) const { return hqmsa::bitstring(expand(x), full_qubits()); }
    [[nodiscard]] AlignmentView alignment(std::uint64_t x) const {
        return decode(BitAssignment::from_index(expand(x), set_.size(), set_.columns()), set_);
    }

    /// Exact minimum of the loss over the register when the table exists.
    [[nodiscard]] std::optional<double> table_minimum() const {
        if (!table_) return std::nullopt;
        return levels_.values().front();
    }

private:
    SequenceSet set_;
    PenaltyParam penalty_;
    LossEvaluator evaluate_;
    std::optional<std::size_t> clamped_;
    std::optional<EnergyTable> table_;
    EnergyLevels levels_;
};

enum class StateClass { Optimal, Feasible, Infeasible };

[[nodiscard]] inline std::string to_string(StateClass c) {
    switch (c) {
        case StateClass::Optimal: return "optimal";
        case StateClass::Feasible: return "feasible";
        default: return "infeasible";
    }
}

struct HistogramRow {
    std::uint64_t index = 0;  // full basis index
    std::string bitstring;
    std::uint64_t count = 0;
    double energy = 0.0;
    bool feasible = false;
    std::optional<StateClass> tag;  // empty when no oracle minimum is known
};

/// Rows ranked by count. `global_min` (from the oracle) enables the
/// optimal/feasible/infeasible tag: optimal means energy equal to the minimum.
[[nodiscard]] inline std::vector<HistogramRow> histogram(const ShotTable& table, const Problem& problem,
                                                         std::optional<double> global_min) {
    std::vector<HistogramRow> rows;
    for (const auto& [idx, c] : table.ranked()) {
        HistogramRow row;
        row.index = problem.expand(idx);
        row.bitstring = problem.bitstring(idx);
        row.count = c;
        row.energy = problem.energy(idx);
        row.feasible = problem.feasible(idx);
        if (global_min) {
            row.tag = row.energy == *global_min ? StateClass::Optimal
                      : row.feasible            ? StateClass::Feasible
                                                : StateClass::Infeasible;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_histogram_csv(std::ostream& out, std::span<const HistogramRow> rows) {
    out << "bitstring,count,energy,feasible,class\n";
    for (const auto& r : rows) {
        out << r.bitstring << ',' << r.count << ',' << r.energy << ',' << (r.feasible ? 1 : 0) << ','
            << (r.tag ? to_string(*r.tag) : std::string("unknown")) << '\n';
    }
}

}  // namespace hqmsa
