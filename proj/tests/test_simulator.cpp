#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hqmsa/circuit.hpp"
#include "hqmsa/oracle.hpp"
#include "hqmsa/rng.hpp"
#include "hqmsa/sampling.hpp"
#include "hqmsa/scoring.hpp"
#include "hqmsa/stats.hpp"

using namespace hqmsa;
using cd = std::complex<double>;

namespace {

// Naive reference simulator: one gate at a time on a plain vector.
struct Ref {
    std::size_t n;
    std::vector<cd> a;
    explicit Ref(std::size_t qubits) : n(qubits), a(std::size_t{1} << qubits) { a[0] = 1.0; }

    void gate(std::size_t q, cd m00, cd m01, cd m10, cd m11) {
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i & bit) continue;
            const cd x = a[i], y = a[i | bit];
            a[i] = m00 * x + m01 * y;
            a[i | bit] = m10 * x + m11 * y;
        }
    }
    void ry(std::size_t q, double t) {
        const double c = std::cos(t / 2), s = std::sin(t / 2);
        gate(q, c, -s, s, c);
    }
    void rx(std::size_t q, double t) {
        const double c = std::cos(t / 2), s = std::sin(t / 2);
        gate(q, c, cd(0, -s), cd(0, -s), c);
    }
    void h(std::size_t q) {
        const double r = 1 / std::sqrt(2.0);
        gate(q, r, r, r, -r);
    }
    void cz(std::size_t p, std::size_t q) {
        const std::size_t b1 = std::size_t{1} << (n - 1 - p), b2 = std::size_t{1} << (n - 1 - q);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if ((i & b1) && (i & b2)) a[i] = -a[i];
        }
    }
    void phase(const std::vector<double>& e, double g) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] *= std::exp(cd(0, -g * e[i]));
    }
};

Ref reference_hea(std::size_t n, std::size_t d, const std::vector<double>& th, Topology topo = Topology::Linear) {
    Ref r(n);
    for (std::size_t q = 0; q < n; ++q) r.ry(q, th[q]);
    for (std::size_t l = 1; l <= d; ++l) {
        for (std::size_t q = 0; q + 1 < n; ++q) r.cz(q, q + 1);
        if (topo == Topology::Ring && n > 2) r.cz(n - 1, 0);
        for (std::size_t q = 0; q < n; ++q) r.ry(q, th[l * n + q]);
    }
    return r;
}

std::vector<double> random_angles(std::size_t k, Rng& rng) {
    std::vector<double> t(k);
    for (auto& x : t) x = rng.uniform(-std::numbers::pi, std::numbers::pi);
    return t;
}

double max_diff(const StateVector& psi, const Ref& r) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.a.size(); ++i) m = std::max(m, std::abs(psi[i] - r.a[i]));
    return m;
}

const std::vector<double> kGolden{3.0, 1.5, 1.5, -1.0};

}  // namespace

TEST(Prepare, SpecExamples) {
    const auto hea0 = make_hea(3, 0);
    const auto psi = prepare(hea0, std::vector<double>(3, 0.0));
    EXPECT_EQ(psi[0], cd(1.0));
    const EnergyTable table(2, kGolden);
    const auto u = prepare(make_qaoa(2, 0), {}, &table);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(u[i] - cd(0.5)), 0.0, 1e-15);
    Rng rng(1);
    const auto th = random_angles(4, rng);
    EXPECT_NEAR(prepare(make_hea(2, 1), th).norm_squared(), 1.0, 1e-10);
}

TEST(Prepare, Errors) {
    EXPECT_THROW((void)prepare(make_hea(2, 1), std::vector<double>(3, 0.0)), DimensionError);
    EXPECT_THROW((void)prepare(make_qaoa(2, 1), std::vector<double>(2, 0.1)), InputError);
    EXPECT_THROW(StateVector(30), CapacityError);
}

TEST(Prepare, ParameterCounts) {
    EXPECT_EQ((AnsatzSpec{AnsatzKind::Hea, 5, 2}.parameter_count()), 15u);
    EXPECT_EQ((AnsatzSpec{AnsatzKind::Qaoa, 5, 3}.parameter_count()), 6u);
    EXPECT_EQ(build_circuit({AnsatzKind::Hea, 5, 2}).parameter_count(), 15u);
}

TEST(Prepare, MatchesReferenceOnRandomCircuits) {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        const std::size_t d = rng.below(4);
        const auto topo = rng.below(2) ? Topology::Ring : Topology::Linear;
        const auto th = random_angles(n * (d + 1), rng);
        const auto psi = prepare(make_hea(n, d, topo), th);
        EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-10);
        EXPECT_LT(max_diff(psi, reference_hea(n, d, th, topo)), 1e-12) << n << ' ' << d;
        std::vector<double> amp;
        prepare_real(make_hea(n, d, topo), th, amp);
        for (std::size_t i = 0; i < amp.size(); ++i) EXPECT_NEAR(amp[i], psi[i].real(), 1e-12);
    }
}

TEST(Prepare, LargeRegisterMatchesReference) {
    // exercises the blocked and tiled kernel paths
    Rng rng(9);
    const std::size_t n = 16;
    const auto th = random_angles(n * 3, rng);
    const auto psi = prepare(make_hea(n, 2), th);
    EXPECT_LT(max_diff(psi, reference_hea(n, 2, th)), 1e-12);
    EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-10);
}

TEST(Prepare, Composition) {
    Rng rng(7);
    const std::size_t n = 5;
    const auto th = random_angles(n * 3, rng);
    auto psi = prepare(make_hea(n, 1), std::span<const double>(th).first(2 * n));
    apply_operation(psi, entangler(n, Topology::Linear), th, nullptr);
    apply_operation(psi, RotationLayer{Axis::Y, 2 * n}, th, nullptr);
    const auto direct = prepare(make_hea(n, 2), th);
    for (std::size_t i = 0; i < psi.dimension(); ++i) EXPECT_NEAR(std::abs(psi[i] - direct[i]), 0.0, 1e-13);
}

TEST(Qaoa, MatchesDirectMatrixComputation) {
    Rng rng(3);
    for (std::size_t n = 1; n <= 3; ++n) {
        std::vector<double> e(std::size_t{1} << n);
        for (auto& v : e) v = static_cast<double>(rng.below(7)) - 3.0;
        const EnergyTable table(n, e);
        for (std::size_t rounds = 1; rounds <= 3; ++rounds) {
            const auto th = random_angles(2 * rounds, rng);
            const auto psi = prepare(make_qaoa(n, rounds), th, &table);
            Ref r(n);
            for (std::size_t q = 0; q < n; ++q) r.h(q);
            for (std::size_t t = 0; t < rounds; ++t) {
                r.phase(e, th[2 * t]);
                for (std::size_t q = 0; q < n; ++q) r.rx(q, 2 * th[2 * t + 1]);
            }
            EXPECT_LT(max_diff(psi, r), 1e-12);
        }
    }
}

TEST(Entanglement, SchmidtRank) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto th0 = random_angles(2, rng);
        const auto p0 = prepare(make_hea(2, 0), th0);
        EXPECT_NEAR(std::abs(p0[0] * p0[3] - p0[1] * p0[2]), 0.0, 1e-14);  // product
        const auto th1 = random_angles(4, rng);
        const auto p1 = prepare(make_hea(2, 1), th1);
        // generic angles: determinant of the 2x2 amplitude matrix is nonzero
        EXPECT_GT(std::abs(p1[0] * p1[3] - p1[1] * p1[2]), 1e-6);
    }
}

TEST(Expectation, Examples) {
    const LossEvaluator ev(SequenceSet({"AAKGT", "AT", "AKG", "KT"}, 5), PenaltyParam(1.5));
    const auto opt = StateVector::basis(20, 0b11111100011011000101);
    EXPECT_EQ(exact_expectation(opt, ev), -10.0);
    const EnergyTable golden(2, kGolden);
    EXPECT_DOUBLE_EQ(exact_expectation(StateVector::uniform(2), golden), (3.0 + 1.5 + 1.5 - 1.0) / 4);
    EXPECT_THROW((void)exact_expectation(StateVector::uniform(3), golden), DimensionError);
}

TEST(Expectation, ShiftAndOracleAgreement) {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        std::vector<double> e(std::size_t{1} << n);
        for (auto& v : e) v = rng.uniform(-20.0, 20.0);
        const EnergyTable table(n, e);
        const auto psi = prepare(make_hea(n, 2), random_angles(3 * n, rng));
        EXPECT_LT(verify_expectation(psi, table), 1e-9);
        const double c = rng.uniform(-5.0, 5.0);
        EXPECT_NEAR(exact_expectation(psi, table.shifted(c)), exact_expectation(psi, table) + c, 1e-12);
    }
}

TEST(Sampling, Examples) {
    const auto b = StateVector::basis(3, 5);
    const auto t = sample(b, 777, 1);
    ASSERT_EQ(t.counts().size(), 1u);
    EXPECT_EQ(t.count(5), 777u);
    const auto u = sample(StateVector::uniform(2), 100000, 2);
    for (std::uint64_t x = 0; x < 4; ++x) EXPECT_NEAR(double(u.count(x)) / 1e5, 0.25, 0.01);
    EXPECT_EQ(sample(StateVector::uniform(4), 2000, 9), sample(StateVector::uniform(4), 2000, 9));
    EXPECT_THROW((void)sample(b, 0, 1), InputError);
}

TEST(Sampling, ChiSquareGoodnessOfFit) {
    Rng rng(12);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto psi = prepare(make_hea(n, 2), random_angles(3 * n, rng));
            const auto t = sample(psi, 100000, 1000 * n + trial + 1);
            EXPECT_EQ(t.shots(), 100000u);
            std::vector<double> obs(psi.dimension());
            for (std::size_t x = 0; x < obs.size(); ++x) obs[x] = double(t.count(x));
            const auto p = psi.probabilities();
            EXPECT_GT(stats::chi_square_gof(obs, p).p_value, 0.001) << n << ' ' << trial;
        }
    }
}

TEST(ShotTable, ModalAndRanking) {
    ShotTable t(3);
    t.add(4, 10);
    t.add(2, 10);
    t.add(7, 3);
    EXPECT_EQ(t.shots(), 23u);
    EXPECT_EQ(t.modal(), 2u);  // tie goes to the smaller index
    const auto r = t.ranked();
    EXPECT_EQ(r.front().first, 2u);
    EXPECT_EQ(r.back().first, 7u);
    EXPECT_THROW((void)ShotTable(2).modal(), InputError);
}

TEST(Noise, ZeroRatesMatchPrepare) {
    Rng rng(2);
    const auto c = make_hea(5, 2);
    const auto th = random_angles(15, rng);
    Rng traj(4);
    const auto a = prepare_noisy(c, th, nullptr, NoiseConfig{}, traj);
    const auto b = prepare(c, th);
    for (std::size_t i = 0; i < a.dimension(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Noise, TrajectoriesStayNormalized) {
    Rng rng(2);
    const auto c = make_hea(6, 3);
    const auto th = random_angles(24, rng);
    const NoiseConfig noise{0.2, 0.3, 0.0, 1};
    for (int k = 0; k < 20; ++k) {
        Rng traj(derive_seed(7, k));
        EXPECT_NEAR(prepare_noisy(c, th, nullptr, noise, traj).norm_squared(), 1.0, 1e-10);
    }
    EXPECT_THROW((NoiseConfig{1.0, 0, 0, 1}.validate()), ConfigError);
}

TEST(Noise, FullReadoutFlipIsFair) {
    const auto t = sample(StateVector::basis(1, 0), 100000, 3, 0.5);
    EXPECT_NEAR(double(t.count(0)) / 1e5, 0.5, 0.01);
    EXPECT_NEAR(double(t.count(1)) / 1e5, 0.5, 0.01);
}
