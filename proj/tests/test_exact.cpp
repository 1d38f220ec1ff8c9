#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qcomp/exact.hpp"

using namespace qcomp;

namespace {

Rational q(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace

TEST(Binomial, SmallValuesAndEdges) {
    EXPECT_EQ(binomial(6, 3), 20);
    EXPECT_EQ(binomial(5, 0), 1);
    EXPECT_EQ(binomial(3, 5), 0);
    EXPECT_EQ(binomial(100, 50).get_str(), "100891344545564193334812497256");
}

TEST(ExactProbability, RejectsValuesOutsideUnitInterval) {
    EXPECT_THROW(ExactProbability(q(3, 2)), DomainError);
    EXPECT_THROW(ExactProbability(q(-1, 5)), DomainError);
    EXPECT_THROW(ExactProbability::ratio(1, 0), DomainError);
    EXPECT_EQ(ExactProbability::ratio(6, 8).str(), "3/4");
    EXPECT_EQ(ExactProbability::ratio(1, 4).complement().str(), "3/4");
}

TEST(SchemeParams, Validation) {
    EXPECT_THROW((SchemeParams{0, 3, 2, 1}.validate()), InvalidParameter);
    EXPECT_THROW((SchemeParams{0, 3, 10, 0}.validate()), InvalidParameter);
    EXPECT_THROW((SchemeParams{0, 3, 10, 4}.validate()), InvalidParameter);
    EXPECT_THROW((SchemeParams{0, 3, capacity::kMaxPoolSize + 1, 1}.validate()), CapacityExceeded);
    EXPECT_NO_THROW((SchemeParams{0, 3, 3, 3}.validate()));
}

TEST(LinkProbability, MatchesEnumeration) {
    for (unsigned pool = 1; pool <= 7; ++pool)
        for (unsigned ring = 1; ring <= std::min(pool, 4u); ++ring)
            for (unsigned t = 1; t <= ring; ++t)
                EXPECT_EQ(link_probability({0, ring, pool, t}).value(), oracle::link_probability(ring, pool, t))
                    << "K=" << ring << " P=" << pool << " q=" << t;
}

TEST(OverlapDistribution, SumsToOneAndIsHypergeometric) {
    const auto d = overlap_distribution({0, 4, 9, 1});
    ASSERT_EQ(d.size(), 5u);
    Rational total = 0;
    for (std::size_t u = 0; u < d.size(); ++u) total += d[u].value();
    EXPECT_EQ(total, 1);
    // C(4,2) C(5,2) / C(9,4) = 60/126
    EXPECT_EQ(d[2].value(), q(10, 21));
}

TEST(FindPoolSize, ClosestPoolWithSmallerOnTies) {
    for (auto [ring, t, target] : {std::tuple{10u, 1u, 0.3}, {10u, 2u, 0.05}, {6u, 3u, 0.01}, {20u, 1u, 0.5}}) {
        const auto pool = find_pool_size(ring, t, target);
        const Rational goal(target);
        auto gap = [&](std::uint32_t p) -> Rational { return abs(link_probability({0, ring, p, t}).value() - goal); };
        EXPECT_LE(gap(pool), gap(pool + 1));
        if (pool > ring) {
            EXPECT_LT(gap(pool), gap(pool - 1)) << pool;
        }
    }
    EXPECT_EQ(find_pool_size(5, 2, 1.0), 5u);
}

TEST(FindPoolSize, DesignPointsForResilienceSweeps) {
    EXPECT_EQ(find_pool_size(40, 1, 0.05), 31233u);
    EXPECT_THROW(find_pool_size(40, 1, 0.0), InvalidParameter);
    EXPECT_THROW(find_pool_size(40, 1, 1.5), InvalidParameter);
    EXPECT_THROW(find_pool_size(200, 1, 0.001), CapacityExceeded);
}

TEST(CoverageDistribution, MatchesEnumeration) {
    for (unsigned pool = 2; pool <= 6; ++pool)
        for (unsigned ring = 1; ring <= std::min(pool, 3u); ++ring)
            for (unsigned m = 1; m <= 3; ++m) {
                const auto dist = coverage_distribution({0, ring, pool, 1}, m);
                const auto expected = oracle::coverage(ring, pool, m);
                for (unsigned keys = 0; keys <= pool; ++keys)
                    EXPECT_EQ(dist.at(keys).value(), expected[keys])
                        << "K=" << ring << " P=" << pool << " m=" << m << " tau=" << keys;
            }
}

TEST(CoveringCounts, CacheIsReusableAcrossPools) {
    const CoveringCounts counts(3, 4, 12);
    for (unsigned pool : {12u, 15u, 40u}) {
        const SchemeParams params{0, 3, pool, 2};
        EXPECT_EQ(compromise_probability_exact(params, 4, &counts), compromise_probability_exact(params, 4));
    }
    EXPECT_THROW(CoveringCounts(0, 1, 1), InvalidParameter);
}

TEST(CompromiseExact, SmallClosedForms) {
    EXPECT_EQ(compromise_probability_exact({0, 2, 4, 1}, 1).str(), "13/30");
    EXPECT_EQ(compromise_probability_exact({0, 1, 2, 1}, 2).str(), "3/4");
    // A captured ring equal to the whole pool exposes everything.
    EXPECT_EQ(compromise_probability_exact({0, 3, 3, 2}, 1).value(), 1);
}

TEST(CompromiseExact, MatchesEnumerationOnSmallGrid) {
    for (unsigned pool = 1; pool <= 5; ++pool)
        for (unsigned ring = 1; ring <= std::min(pool, 3u); ++ring)
            for (unsigned t = 1; t <= ring; ++t)
                for (unsigned m = 1; m <= 2; ++m)
                    EXPECT_EQ(compromise_probability_exact({0, ring, pool, t}, m).value(),
                              oracle::compromise_probability(ring, pool, t, m))
                        << "K=" << ring << " P=" << pool << " q=" << t << " m=" << m;
}

TEST(CompromiseExact, Errors) {
    EXPECT_THROW(compromise_probability_exact({0, 2, 4, 1}, 0), InvalidParameter);
    EXPECT_THROW(compromise_probability_exact({0, 2, 4, 3}, 1), InvalidParameter);
    EXPECT_THROW(compromise_probability_exact({0, 40, 150'000, 1}, 200), CapacityExceeded);
    EXPECT_THROW(compromise_probability_exact({0, 2, 10, 1}, capacity::kMaxCaptures + 1), CapacityExceeded);
}

TEST(CompromiseChan, DiffersFromExactOnlyWhenRingsHoldSeveralKeys) {
    EXPECT_EQ(compromise_probability_chan({0, 2, 4, 1}, 1).str(), "9/20");
    for (unsigned pool : {3u, 7u, 20u})
        for (unsigned m : {1u, 3u})
            EXPECT_EQ(compromise_probability_chan({0, 1, pool, 1}, m), compromise_probability_exact({0, 1, pool, 1}, m));
    EXPECT_NE(compromise_probability_chan({0, 3, 9, 2}, 2), compromise_probability_exact({0, 3, 9, 2}, 2));
}

TEST(AllDistinct, ProductFormula) {
    // m=2, K=2, P=5: C(3,2)/C(5,2)
    EXPECT_EQ(all_distinct_probability({0, 2, 5, 1}, 2).value(), q(3, 10));
    EXPECT_THROW(all_distinct_probability({0, 2, 5, 1}, 3), DomainError);
}

TEST(Bounds, SandwichExactOnRandomTuples) {
    std::mt19937_64 gen(7);
    for (int i = 0; i < 200; ++i) {
        const std::uint32_t ring = 1 + gen() % 5;
        const std::uint32_t t = 1 + gen() % ring;
        const std::uint32_t m = 1 + gen() % 4;
        const std::uint32_t pool = m * ring + 1 + gen() % 40;
        const SchemeParams params{0, ring, pool, t};
        const auto exact = compromise_probability_exact(params, m).value();
        EXPECT_LE(compromise_lower_bound(params, m), exact);
        EXPECT_LE(exact, compromise_upper_bound(params, m));
    }
    EXPECT_THROW(compromise_upper_bound({0, 3, 3, 1}, 1), DomainError);
}
