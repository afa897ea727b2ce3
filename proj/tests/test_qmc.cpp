#include "bqmc/errors.hpp"
#include "bqmc/qmc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace bqmc;

TEST(Sobol, FirstNonzeroPoints) {
    const PointMatrix p = generate_points({PointKind::sobol, 2, 3, 0, false});
    EXPECT_EQ(p(0, 0), 0.5);
    EXPECT_EQ(p(0, 1), 0.5);
    EXPECT_EQ(p(1, 0), 0.75);
    EXPECT_EQ(p(1, 1), 0.25);
    EXPECT_EQ(p(2, 0), 0.25);
    EXPECT_EQ(p(2, 1), 0.75);
}

TEST(Sobol, RandomizedSetKeepsOrigin) {
    const PointMatrix p = generate_points({PointKind::sobol, 3, 4, 0, true});
    EXPECT_EQ(p.row(0).sum(), 0.0);
    EXPECT_EQ(p(1, 0), 0.5);
}

TEST(Sobol, EveryPrefixOfPowerOfTwoIsStratified) {
    // each coordinate of the first 2^k points hits every interval [i/2^k, (i+1)/2^k) once
    const std::size_t n = 256;
    const PointMatrix p = generate_points({PointKind::sobol, 60, n, 0, true});
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        std::set<long> cells;
        for (Eigen::Index i = 0; i < p.rows(); ++i) cells.insert(static_cast<long>(p(i, j) * n));
        EXPECT_EQ(cells.size(), n) << "dimension " << j;
    }
}

TEST(Sobol, TwoDimensionalQuadrantCount) {
    const PointMatrix p = generate_points({PointKind::sobol, 2, 1024, 0, false});
    int count = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) count += p(i, 0) < 0.5 && p(i, 1) < 0.5;
    EXPECT_LE(std::abs(count - 256), 2);
}

TEST(Sobol, SupportsLargeDimensionsAndRejectsBeyondTable) {
    EXPECT_GE(default_sobol_table().max_dimension(), 1040u);
    EXPECT_NO_THROW(generate_points({PointKind::sobol, 1040, 8, 0, false}));
    const std::size_t too_many = default_sobol_table().max_dimension() + 1;
    try {
        generate_points({PointKind::sobol, too_many, 8, 0, false});
        FAIL() << "expected a capability error";
    } catch (const CapabilityError& e) {
        EXPECT_NE(std::string(e.what()).find(std::to_string(too_many - 1)), std::string::npos);
    }
}

TEST(Lattice, UnshiftedDefinition) {
    // with z = (1, 1) the lattice is the diagonal; check via the definition on stored z
    const PointMatrix p = generate_points({PointKind::lattice, 2, 4, 0, false});
    const LatticeVector& z = default_lattice_vector();
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            EXPECT_EQ(p(i, j), static_cast<double>((static_cast<std::uint64_t>(i) * z[j]) % 4) / 4.0);
    EXPECT_EQ(z[0], 1u);
    EXPECT_EQ(p(1, 0), 0.25);
    EXPECT_EQ(p(2, 0), 0.5);
    EXPECT_EQ(p(3, 0), 0.75);
}

TEST(Lattice, ShiftCommutesWithLatticeAddition) {
    const std::size_t n = 64, d = 5;
    const PointMatrix p = generate_points({PointKind::lattice, d, n, 0, true});
    const auto shift = replication_shifts(1, d, 11).front();
    const PointMatrix shifted = randomize(p, {RandomizationKind::mod1_shift, shift});
    // shifting by the k-th lattice point permutes the shifted set
    std::vector<double> fold(shift);
    for (std::size_t j = 0; j < d; ++j) {
        fold[j] += p(5, static_cast<Eigen::Index>(j));
        if (fold[j] >= 1.0) fold[j] -= 1.0;
    }
    const PointMatrix folded = randomize(p, {RandomizationKind::mod1_shift, fold});
    std::multiset<std::vector<long>> a, b;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        std::vector<long> ra, rb;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            ra.push_back(std::lround(shifted(i, j) * 1e9) % 1000000000);
            rb.push_back(std::lround(folded(i, j) * 1e9) % 1000000000);
        }
        a.insert(ra);
        b.insert(rb);
    }
    EXPECT_EQ(a, b);
}

TEST(PseudoRandom, DeterministicGivenSeed) {
    const PointSetConfig c{PointKind::pseudo_random, 7, 100, 42, false};
    EXPECT_EQ(generate_points(c), generate_points(c));
    PointSetConfig other = c;
    other.seed = 43;
    EXPECT_NE(generate_points(c), generate_points(other));
}

TEST(Randomize, ModOneExamples) {
    PointMatrix p(1, 1);
    p(0, 0) = 0.75;
    EXPECT_EQ(randomize(p, {RandomizationKind::mod1_shift, {0.5}})(0, 0), 0.25);
    const PointMatrix q = generate_points({PointKind::lattice, 3, 16, 0, true});
    EXPECT_EQ(randomize(q, {RandomizationKind::mod1_shift, {0.0, 0.0, 0.0}}), q);
}

TEST(Randomize, DigitalShiftIsInvolutionAndPreservesXorStructure) {
    const std::size_t d = 6;
    const PointMatrix p = generate_points({PointKind::sobol, d, 128, 0, true});
    const Randomization r{RandomizationKind::digital_shift, replication_shifts(1, d, 5).front()};
    const PointMatrix s = randomize(p, r);
    EXPECT_EQ(randomize(s, r), p);
    auto bits = [](double x) { return static_cast<std::uint64_t>(std::ldexp(x, 53)); };
    for (Eigen::Index i = 1; i < 20; ++i)
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j)
            EXPECT_EQ(bits(s(0, j)) ^ bits(s(i, j)), bits(p(0, j)) ^ bits(p(i, j)));
}

TEST(Randomize, OutputInUnitInterval) {
    for (PointKind kind : {PointKind::sobol, PointKind::lattice}) {
        const std::size_t d = 40;
        const PointMatrix p = generate_points({kind, d, 512, 0, true});
        for (const auto& shift : replication_shifts(5, d, 9)) {
            const PointMatrix s = randomize(p, {natural_randomization(kind), shift});
            EXPECT_GE(s.minCoeff(), 0.0);
            EXPECT_LT(s.maxCoeff(), 1.0);
        }
    }
}

TEST(Randomize, DimensionMismatchThrows) {
    const PointMatrix p = generate_points({PointKind::sobol, 3, 4, 0, false});
    EXPECT_THROW(randomize(p, {RandomizationKind::digital_shift, {0.1, 0.2}}), std::invalid_argument);
}

TEST(Shifts, CountDistinctAndDeterministic) {
    const auto one = replication_shifts(1, 10, 3);
    ASSERT_EQ(one.size(), 1u);
    for (double v : one.front()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    const auto many = replication_shifts(40, 520, 3);
    ASSERT_EQ(many.size(), 40u);
    std::set<std::vector<double>> unique(many.begin(), many.end());
    EXPECT_EQ(unique.size(), 40u);
    EXPECT_EQ(many, replication_shifts(40, 520, 3));
}
