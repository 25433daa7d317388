#pragma once

// Finite-shot measurement in the computational basis.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hqmsa/error.hpp"
#include "hqmsa/rng.hpp"
#include "hqmsa/scoring.hpp"
#include "hqmsa/statevector.hpp"

namespace hqmsa {

/// Measurement counts keyed by basis index (ascending, so iteration order is
/// deterministic).
class ShotTable {
public:
    ShotTable() = default;
    explicit ShotTable(std::size_t qubits) : qubits_(qubits) {}

    void add(std::uint64_t index, std::uint64_t count = 1) {
        if (count == 0) return;
        counts_[index] += count;
        shots_ += count;
    }

    void merge(const ShotTable& other) {
        for (const auto& [idx, c] : other.counts_) add(idx, c);
    }

    [[nodiscard]] std::size_t qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::uint64_t shots() const noexcept { return shots_; }
    [[nodiscard]] const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }
    [[nodiscard]] std::uint64_t count(std::uint64_t index) const {
        const auto it = counts_.find(index);
        return it == counts_.end() ? 0 : it->second;
    }
    [[nodiscard]] bool empty() const noexcept { return shots_ == 0; }

    /// Most frequent outcome; ties go to the smallest index.
    [[nodiscard]] std::uint64_t modal() const {
        if (counts_.empty()) throw InputError("modal state of an empty shot table");
        auto best = counts_.begin();
        for (auto it = counts_.begin(); it != counts_.end(); ++it) {
            if (it->second > best->second) best = it;
        }
        return best->first;
    }

    /// Entries sorted by descending count (ties by index).
    [[nodiscard]] std::vector<std::pair<std::uint64_t, std::uint64_t>> ranked() const {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> v(counts_.begin(), counts_.end());
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        return v;
    }

    friend bool operator==(const ShotTable&, const ShotTable&) = default;

private:
    std::size_t qubits_ = 0;
    std::uint64_t shots_ = 0;
    std::map<std::uint64_t, std::uint64_t> counts_;
};

/// Flips every measured bit independently with probability `flip`.
[[nodiscard]] inline std::uint64_t readout_noise(std::uint64_t index, std::size_t qubits, double flip, Rng& rng) {
    if (flip <= 0.0) return index;
    for (std::size_t b = 0; b < qubits; ++b) {
        if (rng.bernoulli(flip)) index ^= std::uint64_t{1} << b;
    }
    return index;
}

/// Multinomial draw of `shots` outcomes from a probability vector (need not
/// be exactly normalized). Sorted uniforms are matched against one sweep of
/// the running CDF.
inline void sample_into(ShotTable& table, std::span<const double> probabilities, std::uint64_t shots, Rng& rng,
                        double readout_flip = 0.0) {
    if (shots == 0) throw InputError("shots must be at least 1");
    if (probabilities.empty() || !std::has_single_bit(probabilities.size())) {
        throw DimensionError("probability vector length must be a power of two");
    }
    const std::size_t qubits = static_cast<std::size_t>(std::countr_zero(probabilities.size()));
    double total = 0.0;
    for (double p : probabilities) total += p;
    if (!(total > 0.0)) throw InputError("probabilities sum to zero");

    std::vector<double> u(shots);
    for (auto& x : u) x = rng.uniform() * total;
    std::sort(u.begin(), u.end());

    std::vector<std::uint64_t> outcomes;
    outcomes.reserve(shots);
    std::size_t last_nonzero = 0;
    double cdf = 0.0;
    std::size_t k = 0;
    for (std::size_t x = 0; x < probabilities.size() && k < u.size(); ++x) {
        if (probabilities[x] <= 0.0) continue;
        last_nonzero = x;
        cdf += probabilities[x];
        while (k < u.size() && u[k] < cdf) {
            outcomes.push_back(x);
            ++k;
        }
    }
    if (k < u.size()) {
        for (std::size_t x = probabilities.size(); x-- > 0;) {
            if (probabilities[x] > 0.0) {
                last_nonzero = x;
                break;
            }
        }
    }
    for (; k < u.size(); ++k) outcomes.push_back(last_nonzero);  // rounding at the top of the CDF
    // readout noise draws come after all position draws so the noiseless
    // stream is unaffected by the flip rate
    for (auto x : outcomes) table.add(readout_noise(x, qubits, readout_flip, rng));
}

[[nodiscard]] inline ShotTable sample(std::span<const double> probabilities, std::uint64_t shots, Rng& rng,
                                      double readout_flip = 0.0) {
    ShotTable table(static_cast<std::size_t>(std::countr_zero(probabilities.size())));
    sample_into(table, probabilities, shots, rng, readout_flip);
    return table;
}

[[nodiscard]] inline ShotTable sample(const StateVector& psi, std::uint64_t shots, std::uint64_t seed,
                                      double readout_flip = 0.0) {
    Rng rng(seed);
    const auto p = psi.probabilities();
    return sample(p, shots, rng, readout_flip);
}

/// (energy, count) for every distinct outcome.
template <class Energy>
[[nodiscard]] std::vector<std::pair<double, std::uint64_t>> shot_energies(const ShotTable& table,
                                                                          const Energy& energy) {
    std::vector<std::pair<double, std::uint64_t>> out;
    out.reserve(table.counts().size());
    for (const auto& [idx, c] : table.counts()) out.emplace_back(energy(idx), c);
    return out;
}

}  // namespace hqmsa
