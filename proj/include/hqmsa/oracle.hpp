#pragma once

// Ground truth by exhaustive enumeration: the global minimum with every
// state attaining it, strict local minima on the Hamming-1 graph, plateau
// ("flat") states, and the landscape graph itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hqmsa/circuit.hpp"
#include "hqmsa/error.hpp"
#include "hqmsa/problem.hpp"
#include "hqmsa/scoring.hpp"
#include "hqmsa/statevector.hpp"

namespace hqmsa {

struct MinimumState {
    std::uint64_t index = 0;
    double energy = 0.0;

    friend bool operator==(const MinimumState&, const MinimumState&) = default;
};

struct MinimaReport {
    std::size_t qubits = 0;
    double global_minimum = 0.0;
    std::vector<std::uint64_t> minimizers;   // every state at the global minimum, ascending
    std::vector<MinimumState> local_minima;  // all neighbours strictly higher; sorted by (energy, index)
    std::vector<MinimumState> flat;          // no lower neighbour but at least one equal one
    bool feasible_only = false;
};

inline constexpr std::size_t kLandscapeExportCap = 16;

/// Global minimum by streaming over indices in ascending order; ties are all
/// kept. With `feasible_only` the search is restricted to feasible states.
template <class Energy, class Feasible>
[[nodiscard]] MinimaReport global_minimum(const Energy& energy, const Feasible& feasible, std::size_t qubits,
                                          bool feasible_only, std::size_t cap = kDefaultEnumerationCap) {
    if (qubits > cap) {
        throw CapacityError(std::to_string(qubits) + " qubits exceeds the enumeration cap of " + std::to_string(cap));
    }
    MinimaReport r;
    r.qubits = qubits;
    r.feasible_only = feasible_only;
    r.global_minimum = std::numeric_limits<double>::infinity();
    const std::uint64_t dim = std::uint64_t{1} << qubits;
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (feasible_only && !feasible(x)) continue;
        const double e = energy(x);
        if (e < r.global_minimum) {
            r.global_minimum = e;
            r.minimizers.clear();
        }
        if (e == r.global_minimum) r.minimizers.push_back(x);
    }
    if (r.minimizers.empty()) throw InputError("no state satisfies the feasibility filter");
    return r;
}

/// Strict local minima and flat states of the full Hamming-1 graph over a
/// dense table. Restricted to feasible states when `feasible` is given; note
/// that no two feasible states are Hamming-1 neighbours, so neighbours are
/// always taken from the full graph.
inline void classify_minima(std::span<const double> energies, std::size_t qubits, MinimaReport& report,
                            const std::function<bool(std::uint64_t)>& feasible = {}) {
    report.local_minima.clear();
    report.flat.clear();
    const std::uint64_t dim = std::uint64_t{1} << qubits;
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (feasible && !feasible(x)) continue;
        const double e = energies[x];
        bool lower = false;
        bool equal = false;
        for (std::size_t b = 0; b < qubits && !lower; ++b) {
            const double f = energies[x ^ (std::uint64_t{1} << b)];
            if (f < e) lower = true;
            else if (f == e) equal = true;
        }
        if (lower) continue;
        (equal ? report.flat : report.local_minima).push_back({x, e});
    }
    auto by_energy = [](const MinimumState& a, const MinimumState& b) {
        return a.energy != b.energy ? a.energy < b.energy : a.index < b.index;
    };
    std::sort(report.local_minima.begin(), report.local_minima.end(), by_energy);
    std::sort(report.flat.begin(), report.flat.end(), by_energy);
}

/// brute_force_min over a problem register (clamped or not).
[[nodiscard]] inline MinimaReport brute_force_min(const Problem& problem, bool feasible_only = false) {
    const std::size_t n = problem.register_qubits();
    auto feasible = [&](std::uint64_t x) { return problem.feasible(x); };
    if (problem.has_table()) {
        const auto values = problem.table().values();
        auto r = global_minimum([&](std::uint64_t x) { return values[x]; }, feasible, n, feasible_only);
        classify_minima(values, n, r, feasible_only ? std::function<bool(std::uint64_t)>(feasible) : nullptr);
        return r;
    }
    return global_minimum([&](std::uint64_t x) { return problem.energy(x); }, feasible, n, feasible_only);
}

/// Same on an unclamped instance given only its evaluator (no table needed
/// for the global minimum; local minima need n <= cap for the table).
[[nodiscard]] inline MinimaReport brute_force_min(const LossEvaluator& evaluate, bool feasible_only = false,
                                                  std::size_t cap = kDefaultEnumerationCap) {
    const std::size_t n = evaluate.qubits();
    auto feasible = [&](std::uint64_t x) { return evaluate.feasible(x); };
    const auto table = build_energy_table(evaluate, cap);
    auto r = global_minimum([&](std::uint64_t x) { return table[x]; }, feasible, n, feasible_only, cap);
    classify_minima(table.values(), n, r, feasible_only ? std::function<bool(std::uint64_t)>(feasible) : nullptr);
    return r;
}

struct LandscapeNode {
    std::uint64_t index = 0;
    double energy = 0.0;
    bool feasible = false;
};

/// Hamming-1 graph. The full graph has 2^n nodes and n*2^(n-1) edges. The
/// feasible-only graph is the induced subgraph on feasible states, which has
/// no edges (a single flip always changes a letter count).
struct LandscapeGraph {
    std::size_t qubits = 0;
    std::vector<LandscapeNode> nodes;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;  // (a, b) with a < b

    /// Neighbour lists keyed by position in `nodes`.
    [[nodiscard]] std::vector<std::vector<std::uint64_t>> adjacency() const {
        std::vector<std::vector<std::uint64_t>> adj(nodes.size());
        std::vector<std::size_t> pos(std::size_t{1} << qubits, SIZE_MAX);
        for (std::size_t i = 0; i < nodes.size(); ++i) pos[nodes[i].index] = i;
        for (auto [a, b] : edges) {
            adj[pos[a]].push_back(b);
            adj[pos[b]].push_back(a);
        }
        return adj;
    }
};

[[nodiscard]] inline LandscapeGraph build_landscape(const Problem& problem, bool feasible_only = false,
                                                    std::size_t cap = kLandscapeExportCap) {
    const std::size_t n = problem.register_qubits();
    if (n > cap) {
        throw CapacityError("landscape export is limited to " + std::to_string(cap) + " qubits, got " +
                            std::to_string(n));
    }
    LandscapeGraph g;
    g.qubits = n;
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<char> keep(dim, 1);
    for (std::uint64_t x = 0; x < dim; ++x) {
        const bool f = problem.feasible(x);
        if (feasible_only && !f) {
            keep[x] = 0;
            continue;
        }
        g.nodes.push_back({x, problem.energy(x), f});
    }
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (!keep[x]) continue;
        for (std::size_t b = 0; b < n; ++b) {
            const std::uint64_t y = x | (std::uint64_t{1} << b);
            if (y != x && keep[y]) g.edges.emplace_back(x, y);
        }
    }
    return g;
}

inline void write_landscape_nodes_csv(std::ostream& out, const LandscapeGraph& g, const Problem& problem) {
    out << "index,bitstring,energy,feasible\n";
    for (const auto& node : g.nodes) {
        out << problem.expand(node.index) << ',' << problem.bitstring(node.index) << ',' << node.energy << ','
            << (node.feasible ? 1 : 0) << '\n';
    }
}

inline void write_landscape_edges_csv(std::ostream& out, const LandscapeGraph& g, const Problem& problem) {
    out << "source,target\n";
    for (auto [a, b] : g.edges) out << problem.expand(a) << ',' << problem.expand(b) << '\n';
}

/// |exact_expectation(psi) - sum_x |amp_x|^2 E_x| with the second sum taken in
/// descending index order with compensated (Neumaier) summation.
[[nodiscard]] inline double verify_expectation(const StateVector& psi, const EnergyTable& table) {
    if (psi.dimension() != table.size()) throw DimensionError("verify_expectation: dimension mismatch");
    const double reference = exact_expectation(psi, table);
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t x = psi.dimension(); x-- > 0;) {
        const Amplitude a = psi[x];
        const double term = (a.real() * a.real() + a.imag() * a.imag()) * table[x];
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return std::abs(reference - (sum + comp));
}

}  // namespace hqmsa
