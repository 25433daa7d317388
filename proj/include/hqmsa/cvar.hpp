#pragma once

// Conditional value at risk of a (sampled or exact) energy distribution: the
// mean over the lowest r-fraction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hqmsa/error.hpp"
#include "hqmsa/sampling.hpp"
#include "hqmsa/scoring.hpp"

namespace hqmsa {

inline void check_ratio(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw InputError("CVaR ratio must lie in (0, 1]");
}

/// ceil(r*m) clamped to [1, m]. Products within 1e-9 above an integer round
/// down, so r = 0.6, m = 2000 keeps exactly 1200 samples.
[[nodiscard]] inline std::uint64_t tail_size(double r, std::uint64_t m) {
    const double x = r * static_cast<double>(m);
    auto k = static_cast<std::uint64_t>(std::ceil(x - 1e-9));
    return std::clamp<std::uint64_t>(k, 1, m);
}

/// Mean of the lowest ceil(r*m) of the m energies.
[[nodiscard]] inline double cvar_loss(std::vector<double> energies, double r) {
    if (energies.empty()) throw InputError("CVaR of an empty sample");
    check_ratio(r);
    const auto k = tail_size(r, energies.size());
    std::partial_sort(energies.begin(), energies.begin() + static_cast<std::ptrdiff_t>(k), energies.end());
    double s = 0.0;
    for (std::uint64_t i = 0; i < k; ++i) s += energies[i];
    return s / static_cast<double>(k);
}

/// Same estimator on (energy, multiplicity) pairs; every shot counts once.
[[nodiscard]] inline double cvar_loss(std::vector<std::pair<double, std::uint64_t>> weighted, double r) {
    check_ratio(r);
    std::uint64_t m = 0;
    for (const auto& w : weighted) m += w.second;
    if (m == 0) throw InputError("CVaR of an empty sample");
    std::sort(weighted.begin(), weighted.end());
    std::uint64_t left = tail_size(r, m);
    const auto k = left;
    double s = 0.0;
    for (const auto& [e, c] : weighted) {
        const auto take = std::min(c, left);
        s += e * static_cast<double>(take);
        left -= take;
        if (left == 0) break;
    }
    return s / static_cast<double>(k);
}

template <class Energy>
[[nodiscard]] double cvar_loss(const ShotTable& table, const Energy& energy, double r) {
    return cvar_loss(shot_energies(table, energy), r);
}

/// Energy table grouped into its distinct values (few, since energies are
/// small integers plus multiples of p). Lets the exact CVaR of a 2^n
/// distribution be found in one linear pass.
class EnergyLevels {
public:
    EnergyLevels() = default;

    explicit EnergyLevels(std::span<const double> energies) : size_(energies.size()) {
        values_.assign(energies.begin(), energies.end());
        std::sort(values_.begin(), values_.end());
        values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
        if (values_.size() > 65535) throw CapacityError("too many distinct energy levels");
        level_.resize(energies.size());
        for (std::size_t x = 0; x < energies.size(); ++x) {
            level_[x] = static_cast<std::uint16_t>(
                std::lower_bound(values_.begin(), values_.end(), energies[x]) - values_.begin());
        }
    }

    explicit EnergyLevels(const EnergyTable& table) : EnergyLevels(table.values()) {}

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::uint16_t level(std::uint64_t x) const { return level_[x]; }
    [[nodiscard]] double energy(std::uint64_t x) const { return values_[level_[x]]; }

    /// Probability mass on each level.
    [[nodiscard]] std::vector<double> mass(std::span<const double> probabilities) const {
        if (probabilities.size() != size_) throw DimensionError("energy levels: size mismatch");
        std::vector<double> m(values_.size(), 0.0);
        for (std::size_t x = 0; x < size_; ++x) m[level_[x]] += probabilities[x];
        return m;
    }

private:
    std::size_t size_ = 0;
    std::vector<double> values_;
    std::vector<std::uint16_t> level_;
};

/// Exact CVaR of the distribution `probabilities` and its sensitivity to each
/// probability. The gradient of CVaR with respect to circuit parameters is the
/// gradient of <W> where W is the returned per-level weight (held fixed):
/// (E - E_b)/r below the boundary level E_b, zero elsewhere. At r = 1 the
/// weight is simply E.
struct ExactCvar {
    double value = 0.0;
    std::vector<double> level_weight;  // indexed like EnergyLevels::values()
};

[[nodiscard]] inline ExactCvar exact_cvar(const EnergyLevels& levels, std::span<const double> probabilities,
                                          double r) {
    check_ratio(r);
    const auto vals = levels.values();
    ExactCvar out;
    out.level_weight.assign(vals.size(), 0.0);
    const auto mass = levels.mass(probabilities);
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) throw InputError("probabilities sum to zero");
    if (r == 1.0) {
        double s = 0.0;
        for (std::size_t l = 0; l < vals.size(); ++l) {
            s += mass[l] * vals[l];
            out.level_weight[l] = vals[l];
        }
        out.value = s / total;
        return out;
    }
    const double target = r * total;
    double cum = 0.0;
    std::size_t boundary = vals.size() - 1;
    for (std::size_t l = 0; l < vals.size(); ++l) {
        if (cum + mass[l] >= target) {
            boundary = l;
            break;
        }
        cum += mass[l];
    }
    const double eb = vals[boundary];
    double s = 0.0;
    for (std::size_t l = 0; l < boundary; ++l) {
        s += mass[l] * (vals[l] - eb);
        out.level_weight[l] = (vals[l] - eb) / r;
    }
    out.value = eb + s / target;
    return out;
}

}  // namespace hqmsa
