#pragma once

#include <cstdint>
#include <random>

namespace hqmsa {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent per-task stream seed from (master seed, task id).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(task + 0x632be59bd9b4e019ULL));
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                                  std::uint64_t b) noexcept {
    return derive_seed(derive_seed(master, a), b);
}

/// mt19937_64 with distribution code written out by hand so that streams are
/// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
    [[nodiscard]] std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = engine_();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    [[nodiscard]] bool bernoulli(double p) { return p > 0.0 && uniform() < p; }

    /// +1 or -1 with equal probability.
    [[nodiscard]] double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace hqmsa
