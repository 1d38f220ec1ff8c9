#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qcomp/estimators.hpp"
#include "qcomp/exact.hpp"

using namespace qcomp;

namespace {

SimulationOptions workers(unsigned n) {
    SimulationOptions options;
    options.workers = n;
    return options;
}

}  // namespace

TEST(EstimateConnectivity, TwoNodesMatchDiskArea) {
    const auto estimate = estimate_connectivity({2, 1, 1, 1}, 0.5, 20'000, 42);
    EXPECT_TRUE(estimate.within(std::numbers::pi / 4, 3)) << estimate.point_estimate;
    EXPECT_EQ(estimate.trial_count, 20'000u);
    EXPECT_EQ(estimate.seed, 42u);
}

TEST(EstimateConnectivity, SingleSurvivorIsConnected) {
    EXPECT_EQ(estimate_connectivity({1, 2, 10, 1}, 0.1, 10, 1).point_estimate, 1.0);
    EXPECT_EQ(estimate_connectivity({5, 2, 10, 1}, 0.01, 10, 1, 4).point_estimate, 1.0);
}

TEST(EstimateConnectivity, IndependentOfWorkerCount) {
    const SchemeParams params{300, 10, 500, 1};
    const auto one = estimate_connectivity(params, 0.2, 60, 99, 0, workers(1));
    const auto many = estimate_connectivity(params, 0.2, 60, 99, 0, workers(5));
    EXPECT_EQ(one.hits, many.hits);
    EXPECT_GT(one.hits, 0u);
    EXPECT_LT(one.hits, 60u);
}

TEST(EstimateConnectivity, Errors) {
    EXPECT_THROW(estimate_connectivity({10, 2, 10, 1}, 0.1, 0, 1), InvalidParameter);
    EXPECT_THROW(estimate_connectivity({10, 2, 10, 1}, 0.1, 5, 1, 10), InvalidParameter);
    EXPECT_THROW(estimate_connectivity({10, 2, 10, 1}, 0.7, 5, 1), InvalidParameter);
}

TEST(EstimateEdgeDensity, MatchesLinkTimesDiskArea) {
    const SchemeParams params{200, 4, 40, 1};
    const double expected = link_probability(params).to_double() * std::numbers::pi * 0.2 * 0.2;
    const auto estimate = estimate_edge_density(params, 0.2, 400, 7);
    EXPECT_TRUE(estimate.within(expected, 4)) << estimate.point_estimate << " vs " << expected;
}

TEST(EstimateCompromise, AgreesWithExactOnSmallScheme) {
    const SchemeParams params{12, 2, 4, 1};
    const auto estimate = estimate_compromise(params, 1, 20'000, 42);
    EXPECT_TRUE(estimate.within(13.0 / 30.0, 3)) << estimate.point_estimate << " +- " << estimate.standard_error;
    EXPECT_FALSE(estimate.degenerate);
}

TEST(EstimateCompromise, AgreesWithEnumerationForThresholdTwo) {
    const SchemeParams params{10, 3, 6, 2};
    const double expected = oracle::compromise_probability(3, 6, 2, 2).get_d();
    const auto estimate = estimate_compromise(params, 2, 20'000, 5);
    EXPECT_TRUE(estimate.within(expected, 3)) << estimate.point_estimate << " vs " << expected;
}

TEST(EstimateCompromise, HardenedLinksNeverBreak) {
    CompromiseOptions options;
    options.hardened = true;
    const auto estimate = estimate_compromise({20, 5, 30, 1}, 5, 200, 1, options);
    EXPECT_EQ(estimate.hits, 0u);
    EXPECT_GT(estimate.weight, 0u);
}

TEST(EstimateCompromise, DegenerateWhenNoPairEverLinks) {
    const auto estimate = estimate_compromise({4, 1, 200'000, 1}, 1, 3, 1);
    EXPECT_TRUE(estimate.degenerate);
    EXPECT_EQ(estimate.weight, 0u);
}

TEST(EstimateCompromise, Errors) {
    EXPECT_THROW(estimate_compromise({10, 2, 10, 1}, 0, 10, 1), InvalidParameter);
    EXPECT_THROW(estimate_compromise({10, 2, 10, 1}, 9, 10, 1), InvalidParameter);
    CompromiseOptions options;
    options.geometric_radius = 0.9;
    EXPECT_THROW(estimate_compromise({10, 2, 10, 1}, 2, 10, 1, options), InvalidParameter);
}

TEST(EstimateReplication, AgreesWithEnumeratedMissProbability) {
    const double miss = oracle::miss_probability(2, 3, 8, 1).get_d();
    const double expected = 1 - std::pow(miss, 6);
    const auto estimate = estimate_replication(3, 8, 1, 2, 3, 2, 20'000, 42);
    EXPECT_TRUE(estimate.within(expected, 3)) << estimate.point_estimate << " vs " << expected;
}

TEST(EstimateReplication, PoissonNeighboursMatchCompoundForm) {
    // E[alpha^N] for N ~ Poisson(cd) is exp(-cd (1 - alpha)).
    const double miss = oracle::miss_probability(3, 3, 10, 2).get_d();
    const double expected = 1 - std::exp(-4.0 * 3.0 * (1 - miss));
    ReplicationOptions options;
    options.poisson_neighbours = true;
    const auto estimate = estimate_replication(3, 10, 2, 3, 4, 3, 20'000, 8, options);
    EXPECT_TRUE(estimate.within(expected, 3)) << estimate.point_estimate << " vs " << expected;
}

TEST(EstimateReplication, Errors) {
    EXPECT_THROW(estimate_replication(3, 10, 1, 0, 1, 1, 10, 1), InvalidParameter);
    EXPECT_THROW(estimate_replication(3, 10, 1, 11, 1, 1, 10, 1), InvalidParameter);
    EXPECT_THROW(estimate_replication(3, 10, 1, 2, 0, 1, 10, 1), InvalidParameter);
    EXPECT_THROW(estimate_replication(3, 10, 1, 2, 1, 1, 0, 1), InvalidParameter);
}

TEST(EstimateCompromise, SingleKeyRingsWithTwoCaptures) {
    const auto estimate = estimate_compromise({6, 1, 2, 1}, 2, 100'000, 3);
    EXPECT_TRUE(estimate.within(0.75, 3)) << estimate.point_estimate;
}

TEST(EstimateReplication, SingleKeyCoinFlipAndFullPool) {
    const auto coin = estimate_replication(1, 2, 1, 1, 1, 1, 20'000, 4);
    EXPECT_TRUE(coin.within(0.5, 3)) << coin.point_estimate;
    EXPECT_EQ(estimate_replication(3, 12, 2, 12, 2, 2, 100, 4).point_estimate, 1.0);
}
