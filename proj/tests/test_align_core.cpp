#include <gtest/gtest.h>

#include "hqmsa/align_core.hpp"
#include "hqmsa/fasta.hpp"
#include "hqmsa/rng.hpp"

using namespace hqmsa;

namespace {

const SequenceSet kFig3{{"AAKGT", "AT", "AKG", "KT"}, 5};
const char* kFig3Optimum = "11111 10001 10110 00101";

AlignmentView rows(std::vector<std::string> r) { return AlignmentView{std::move(r)}; }

// Eq. of the position map by direct prefix sums, written independently.
std::vector<int> prefix_reference(const std::vector<int>& bits, int len) {
    std::vector<int> f;
    int sum = 0;
    for (int b : bits) {
        sum += b;
        f.push_back(b == 1 && sum <= len ? sum - 1 : -1);
    }
    return f;
}

}  // namespace

TEST(Residue, AlphabetOnly) {
    EXPECT_EQ(Residue('A').symbol(), 'A');
    EXPECT_THROW(Residue('_'), InputError);
    EXPECT_THROW(Residue('B'), InputError);
    EXPECT_THROW(Residue('a'), InputError);
}

TEST(SequenceSet, Validation) {
    EXPECT_THROW(SequenceSet(std::vector<std::string>{}), InputError);
    EXPECT_THROW(SequenceSet({"AG", ""}), InputError);
    EXPECT_THROW(SequenceSet({"AG", "A_G"}), InputError);
    EXPECT_THROW(SequenceSet({"AGT", "AG"}, 2), DimensionError);
    EXPECT_THROW(SequenceSet({"AG", "AG"}, 2, 5), InputError);
    const SequenceSet s({"ACGTCAT", "ACGGTTAT"}, 10);
    EXPECT_EQ(s.qubits(), 20u);
    EXPECT_EQ(SequenceSet({"AG", "AKG"}).columns(), 3u);  // default L = max length
}

TEST(Encode, WorkedExamples) {
    EXPECT_EQ(encode(rows({"AG__"})).to_string(), "1100");
    EXPECT_EQ(encode(rows({"A_G_"})).to_string(), "1010");
    EXPECT_EQ(encode(rows({"____"})).to_string(), "0000");
    EXPECT_THROW((void)encode(rows({"AG_", "A"}), 3), DimensionError);
}

TEST(PositionMap, WorkedExamples) {
    const SequenceSet ag({"AG"}, 4);
    EXPECT_EQ(position_map(ag, 0, BitAssignment::from_string("0111", 1, 4)), (PositionMap{-1, 0, 1, -1}));
    EXPECT_EQ(position_map(ag, 0, BitAssignment::from_string("0000", 1, 4)), (PositionMap{-1, -1, -1, -1}));
    const SequenceSet five({"AAKGT"}, 5);
    EXPECT_EQ(position_map(five, 0, BitAssignment::from_string("11111", 1, 5)), (PositionMap{0, 1, 2, 3, 4}));
    EXPECT_THROW((void)position_map(ag, 1, BitAssignment(1, 4)), DimensionError);
}

TEST(Decode, Fig3Optimum) {
    const auto bits = BitAssignment::from_string(kFig3Optimum, 4, 5);
    EXPECT_EQ(decode(bits, kFig3).rows, (std::vector<std::string>{"AAKGT", "A___T", "A_KG_", "__K_T"}));
    EXPECT_TRUE(is_feasible(bits, kFig3));
    EXPECT_EQ(bits.index(), 0b11111100011011000101u);
}

TEST(Decode, OverflowRendersAsGaps) {
    const SequenceSet ag({"AG"}, 4);
    EXPECT_EQ(decode(BitAssignment::from_string("1111", 1, 4), ag).rows.front(), "AG__");
    EXPECT_EQ(decode(BitAssignment(4, 5), kFig3).rows, (std::vector<std::string>(4, "_____")));
}

TEST(Feasible, Examples) {
    EXPECT_FALSE(is_feasible(BitAssignment(4, 5), kFig3));
    EXPECT_FALSE(is_feasible(BitAssignment::from_string("0111", 1, 4), SequenceSet({"AG"}, 4)));
    EXPECT_TRUE(is_feasible(BitAssignment::from_string("0101", 1, 4), SequenceSet({"AG"}, 4)));
}

TEST(BitAssignment, IndexRoundTripMsbFirst) {
    const auto b = BitAssignment::from_string("1000", 2, 2);
    EXPECT_EQ(b.index(), 8u);
    EXPECT_TRUE(b(0, 0));
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const auto x = rng.below(std::uint64_t{1} << 20);
        EXPECT_EQ(BitAssignment::from_index(x, 4, 5).index(), x);
    }
    EXPECT_THROW(BitAssignment(2, 2, {1, 0, 1}), DimensionError);
    EXPECT_THROW(BitAssignment(1, 2, {1, 2}), InputError);
}

TEST(Properties, FeasibleRoundTripOnFig3) {
    std::size_t feasible = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << 20); x += 7) {
        const auto b = BitAssignment::from_index(x, 4, 5);
        if (!is_feasible(b, kFig3)) continue;
        ++feasible;
        EXPECT_EQ(encode(decode(b, kFig3), 5), b);
    }
    EXPECT_GT(feasible, 0u);
}

TEST(Properties, MonotoneMapAndGapNeutrality) {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t L = 1 + rng.below(8);
        const std::size_t len = 1 + rng.below(L);
        std::vector<std::uint8_t> row(L);
        for (auto& b : row) b = static_cast<std::uint8_t>(rng.below(2));
        const auto f = position_map(row, len);
        int last = -1;
        std::size_t nonneg = 0, pop = 0;
        for (std::size_t k = 0; k < L; ++k) {
            pop += row[k];
            if (f[k] < 0) continue;
            EXPECT_GT(f[k], last);
            last = f[k];
            ++nonneg;
        }
        EXPECT_EQ(nonneg, std::min(pop, len));
        // clearing bit k leaves every column left of k unchanged
        const std::size_t k = rng.below(L);
        auto cleared = row;
        cleared[k] = 0;
        const auto g = position_map(cleared, len);
        for (std::size_t j = 0; j < k; ++j) EXPECT_EQ(f[j], g[j]);
    }
}

TEST(Properties, ExhaustiveSmallCase) {
    const SequenceSet ag({"AG"}, 3);
    for (std::uint64_t x = 0; x < 8; ++x) {
        const auto b = BitAssignment::from_index(x, 1, 3);
        std::vector<int> bits;
        for (std::size_t k = 0; k < 3; ++k) bits.push_back(b(0, k) ? 1 : 0);
        const auto f = position_map(ag, 0, b);
        EXPECT_EQ(f, prefix_reference(bits, 2)) << x;
        const auto view = decode(b, ag);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_EQ(view.rows[0][k], f[k] < 0 ? '_' : "AG"[f[k]]);
        }
        // encoding the decoded view drops only the overflow bits
        std::string expect;
        for (int v : f) expect += v < 0 ? '0' : '1';
        EXPECT_EQ(encode(view, 3).to_string(), expect);
    }
}

TEST(Fasta, ParsesRecords) {
    const auto recs = parse_fasta(">s1 first\nAAK\nGT\n\n>s2\n  AT  \n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].name, "s1 first");
    EXPECT_EQ(recs[0].sequence, "AAKGT");
    EXPECT_EQ(recs[1].sequence, "AT");
    EXPECT_THROW((void)parse_fasta("AT\n>x\nA\n"), InputError);
    EXPECT_THROW((void)parse_fasta(">x\n>y\nA\n"), InputError);
    EXPECT_THROW((void)read_fasta(std::filesystem::path("/nonexistent.fa")), IoError);
}
