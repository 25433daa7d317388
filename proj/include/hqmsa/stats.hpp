#pragma once

// Summary statistics and the two hypothesis tests used by the studies.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "hqmsa/error.hpp"

namespace hqmsa::stats {

[[nodiscard]] inline double mean(std::span<const double> x) {
    if (x.empty()) throw InputError("mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Sample variance (n - 1 denominator).
[[nodiscard]] inline double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

[[nodiscard]] inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

[[nodiscard]] inline double median(std::span<const double> x) {
    if (x.empty()) throw InputError("median of an empty sample");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct TestResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Welch's t-test of H1: mean(a) < mean(b). Identical constant samples give
/// p = 1 when the means agree and p = 0 when mean(a) < mean(b).
[[nodiscard]] inline TestResult welch_less(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InputError("Welch test needs at least two samples per group");
    const double ma = mean(a);
    const double mb = mean(b);
    const double va = variance(a) / static_cast<double>(a.size());
    const double vb = variance(b) / static_cast<double>(b.size());
    TestResult r;
    const double se2 = va + vb;
    if (se2 == 0.0) {
        r.statistic = ma < mb ? -INFINITY : (ma > mb ? INFINITY : 0.0);
        r.dof = static_cast<double>(a.size() + b.size() - 2);
        r.p_value = ma < mb ? 0.0 : 1.0;
        return r;
    }
    r.statistic = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 /
            (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    const boost::math::students_t dist(r.dof);
    r.p_value = boost::math::cdf(dist, r.statistic);
    return r;
}

/// Pearson chi-square goodness of fit of `observed` counts to `expected`
/// probabilities; cells with zero expected probability must be empty.
[[nodiscard]] inline TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.empty()) throw DimensionError("chi-square: size mismatch");
    double total = 0.0;
    for (double o : observed) total += o;
    TestResult r;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected[i] * total;
        if (e == 0.0) {
            if (observed[i] != 0.0) {
                r.p_value = 0.0;
                r.statistic = INFINITY;
                return r;
            }
            continue;
        }
        ++cells;
        r.statistic += (observed[i] - e) * (observed[i] - e) / e;
    }
    r.dof = static_cast<double>(cells) - 1.0;
    if (r.dof < 1.0) {
        r.p_value = 1.0;
        return r;
    }
    const boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

}  // namespace hqmsa::stats
