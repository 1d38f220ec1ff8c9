#pragma once

// Monte Carlo estimators over independent network realizations. Each trial
// draws from RandomStream::for_trial(seed, index) and returns integer counts;
// counts are summed, so results do not depend on worker count or order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <optional>
#include <thread>
#include <vector>

#include "qcomp/errors.hpp"
#include "qcomp/exact.hpp"
#include "qcomp/network.hpp"
#include "qcomp/rng.hpp"

namespace qcomp {

struct EstimateWithCI {
    double point_estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t trial_count = 0;
    std::uint64_t seed = 0;
    /// Numerator and denominator of the estimate. For Bernoulli estimates the
    /// denominator is the trial count; for ratio estimates it is the number of
    /// eligible pairs seen.
    std::uint64_t hits = 0;
    std::uint64_t weight = 0;
    /// No eligible observation in any trial; the point estimate carries no
    /// information.
    bool degenerate = false;

    bool within(double expected, double sigmas) const {
        return std::abs(point_estimate - expected) <= sigmas * standard_error;
    }
};

struct SimulationOptions {
    unsigned workers = 0;  // 0 picks std::thread::hardware_concurrency()
};

namespace detail {

using Wide = unsigned __int128;

/// Per-trial (hits, eligible) pairs accumulated for a ratio estimator.
struct RatioTally {
    std::uint64_t hits = 0;
    std::uint64_t eligible = 0;
    Wide hits_sq = 0;
    Wide eligible_sq = 0;
    Wide cross = 0;

    void add_trial(std::uint64_t h, std::uint64_t e) {
        hits += h;
        eligible += e;
        hits_sq += Wide{h} * h;
        eligible_sq += Wide{e} * e;
        cross += Wide{h} * e;
    }

    RatioTally& operator+=(const RatioTally& o) {
        hits += o.hits;
        eligible += o.eligible;
        hits_sq += o.hits_sq;
        eligible_sq += o.eligible_sq;
        cross += o.cross;
        return *this;
    }
};

inline unsigned resolve_workers(const SimulationOptions& options, std::uint64_t trials) {
    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(trials, 1)));
}

/// Runs trial(index, tally) for every index, splitting the range over workers.
template <typename Tally, typename Trial>
Tally run_trials(std::uint64_t trials, const SimulationOptions& options, Trial trial) {
    const unsigned workers = resolve_workers(options, trials);
    std::vector<Tally> tallies(workers);
    auto work = [&](unsigned w) {
        const std::uint64_t begin = trials * w / workers;
        const std::uint64_t end = trials * (w + 1) / workers;
        for (std::uint64_t t = begin; t < end; ++t) trial(t, tallies[w]);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    Tally total{};
    for (const auto& t : tallies) total += t;
    return total;
}

struct CountTally {
    std::uint64_t hits = 0;
    CountTally& operator+=(const CountTally& o) {
        hits += o.hits;
        return *this;
    }
};

inline EstimateWithCI bernoulli_estimate(std::uint64_t hits, std::uint64_t trials, std::uint64_t seed) {
    EstimateWithCI out;
    out.trial_count = trials;
    out.seed = seed;
    out.hits = hits;
    out.weight = trials;
    out.point_estimate = static_cast<double>(hits) / static_cast<double>(trials);
    out.standard_error = std::sqrt(out.point_estimate * (1.0 - out.point_estimate) / static_cast<double>(trials));
    return out;
}

/// Ratio-of-sums estimate with a delta-method standard error across trials.
inline EstimateWithCI ratio_estimate(const RatioTally& tally, std::uint64_t trials, std::uint64_t seed) {
    EstimateWithCI out;
    out.trial_count = trials;
    out.seed = seed;
    out.hits = tally.hits;
    out.weight = tally.eligible;
    if (tally.eligible == 0) {
        out.degenerate = true;
        return out;
    }
    const long double total = static_cast<long double>(tally.eligible);
    const long double p = static_cast<long double>(tally.hits) / total;
    out.point_estimate = static_cast<double>(p);
    if (trials < 2) {
        out.standard_error = static_cast<double>(std::sqrt(p * (1 - p) / total));
        return out;
    }
    const long double spread = static_cast<long double>(tally.hits_sq) -
                               2 * p * static_cast<long double>(tally.cross) +
                               p * p * static_cast<long double>(tally.eligible_sq);
    const long double n = static_cast<long double>(trials);
    out.standard_error = static_cast<double>(std::sqrt(std::max<long double>(spread, 0) * n / (n - 1)) / total);
    return out;
}

inline void check_trials(std::uint64_t trials) {
    if (trials < 1) throw InvalidParameter("need at least one trial");
}

}  // namespace detail

/// Fraction of trials in which the secure topology on the n - m surviving
/// nodes is connected; the m captured nodes are uniform per trial.
inline EstimateWithCI estimate_connectivity(const SchemeParams& params, double radius, std::uint64_t trials,
                                            std::uint64_t seed, std::uint32_t captured = 0,
                                            const SimulationOptions& options = {}) {
    params.validate();
    detail::check_trials(trials);
    if (params.node_count < 1) throw InvalidParameter("a network needs at least one node");
    if (captured >= params.node_count) throw InvalidParameter("need m < n");
    if (!(radius > 0.0 && radius <= 0.5)) throw InvalidParameter("transmission radius must lie in (0, 1/2]");

    const auto tally = detail::run_trials<detail::CountTally>(trials, options, [&](std::uint64_t t, auto& acc) {
        auto rng = RandomStream::for_trial(seed, t);
        NetworkInstance instance = sample_instance(params, radius, rng);
        instance.captured = sample_captured(params.node_count, captured, rng);
        std::vector<bool> alive(params.node_count, true);
        for (auto node : instance.captured) alive[node] = false;
        if (params.node_count - captured == 1) {
            ++acc.hits;
            return;
        }
        build_secure_graph(instance);
        if (is_connected_among(instance.secure_edges, alive)) ++acc.hits;
    });
    return detail::bernoulli_estimate(tally.hits, trials, seed);
}

/// Fraction of node pairs joined by a secure edge, pooled over trials.
inline EstimateWithCI estimate_edge_density(const SchemeParams& params, double radius, std::uint64_t trials,
                                            std::uint64_t seed, const SimulationOptions& options = {}) {
    params.validate();
    detail::check_trials(trials);
    if (params.node_count < 2) throw InvalidParameter("edge density needs at least two nodes");
    const std::uint64_t pairs = std::uint64_t{params.node_count} * (params.node_count - 1) / 2;
    const auto tally = detail::run_trials<detail::RatioTally>(trials, options, [&](std::uint64_t t, auto& acc) {
        auto rng = RandomStream::for_trial(seed, t);
        NetworkInstance instance = sample_instance(params, radius, rng);
        build_secure_graph(instance);
        acc.add_trial(instance.secure_edges.size(), pairs);
    });
    return detail::ratio_estimate(tally, trials, seed);
}

struct CompromiseOptions {
    /// Models link-key renewal through a one-way function after neighbour
    /// discovery: captured keys no longer expose any other link.
    bool hardened = false;
    /// Only count pairs within this torus distance. This departs from the
    /// key-level metric and is meant for exploration.
    std::optional<double> geometric_radius;
    SimulationOptions simulation;
};

/// Among linked pairs of non-captured nodes, the fraction whose whole shared
/// key set lies inside the keys of the m captured nodes.
inline EstimateWithCI estimate_compromise(const SchemeParams& params, std::uint32_t captures, std::uint64_t trials,
                                          std::uint64_t seed, const CompromiseOptions& options = {}) {
    params.validate();
    detail::check_trials(trials);
    if (captures < 1 || std::uint64_t{captures} + 2 > params.node_count)
        throw InvalidParameter("need 1 <= m <= n - 2 captured nodes");
    if (options.geometric_radius && !(*options.geometric_radius > 0.0 && *options.geometric_radius <= 0.5))
        throw InvalidParameter("transmission radius must lie in (0, 1/2]");

    const std::uint32_t n = params.node_count;
    const std::uint32_t threshold = params.overlap_threshold;
    const auto tally = detail::run_trials<detail::RatioTally>(trials, options.simulation, [&](std::uint64_t t,
                                                                                              auto& acc) {
        auto rng = RandomStream::for_trial(seed, t);
        const KeyRings rings = sample_key_rings(params, rng);
        const auto captured = sample_captured(n, captures, rng);
        std::vector<Point> points;
        if (options.geometric_radius) points = sample_positions(n, rng);

        std::vector<std::uint8_t> exposed(params.key_pool_size, 0);
        std::vector<bool> alive(n, true);
        for (auto node : captured) {
            alive[node] = false;
            for (auto key : rings[node]) exposed[key] = 1;
        }
        const double limit = options.geometric_radius ? *options.geometric_radius * *options.geometric_radius : 0.0;

        std::uint64_t linked = 0;
        std::uint64_t broken = 0;
        std::vector<std::uint32_t> shared;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (std::uint32_t j = i + 1; j < n; ++j) {
                if (!alive[j]) continue;
                if (options.geometric_radius && torus_distance_squared(points[i], points[j]) > limit) continue;
                shared.clear();
                std::set_intersection(rings[i].begin(), rings[i].end(), rings[j].begin(), rings[j].end(),
                                      std::back_inserter(shared));
                if (shared.size() < threshold) continue;
                ++linked;
                if (options.hardened) continue;
                if (std::all_of(shared.begin(), shared.end(), [&](std::uint32_t k) { return exposed[k] != 0; }))
                    ++broken;
            }
        }
        acc.add_trial(broken, linked);
    });
    return detail::ratio_estimate(tally, trials, seed);
}

struct ReplicationOptions {
    /// Draw each replica's neighbour count from Poisson(d) instead of exactly d.
    bool poisson_neighbours = false;
    SimulationOptions simulation;
};

/// Fraction of trials in which some replica shares at least q keys with some
/// benign neighbour. All c replicas carry the same uniform b-subset.
inline EstimateWithCI estimate_replication(std::uint32_t ring, std::uint32_t pool, std::uint32_t threshold,
                                           std::uint32_t keys_per_replica, std::uint64_t replicas,
                                           std::uint64_t density, std::uint64_t trials, std::uint64_t seed,
                                           const ReplicationOptions& options = {}) {
    SchemeParams params{0, ring, pool, threshold};
    params.validate();
    detail::check_trials(trials);
    if (keys_per_replica < 1 || keys_per_replica > pool) throw InvalidParameter("keys per replica must lie in [1, P]");
    if (replicas < 1 || density < 1) throw InvalidParameter("need c, d >= 1");
    if (options.poisson_neighbours && density > 500) throw InvalidParameter("Poisson density above 500 unsupported");

    const auto tally = detail::run_trials<detail::CountTally>(trials, options.simulation, [&](std::uint64_t t,
                                                                                              auto& acc) {
        auto rng = RandomStream::for_trial(seed, t);
        SubsetSampler sampler;
        std::vector<std::uint32_t> payload(keys_per_replica);
        sampler.sample(keys_per_replica, pool, rng, payload);
        std::vector<std::uint8_t> held(pool, 0);
        for (auto key : payload) held[key] = 1;

        std::vector<std::uint32_t> benign(ring);
        for (std::uint64_t r = 0; r < replicas; ++r) {
            const std::uint64_t neighbours =
                options.poisson_neighbours ? rng.poisson(static_cast<double>(density)) : density;
            for (std::uint64_t k = 0; k < neighbours; ++k) {
                sampler.sample(ring, pool, rng, benign);
                std::uint32_t shared = 0;
                for (auto key : benign) shared += held[key];
                if (shared >= threshold) {
                    ++acc.hits;
                    return;
                }
            }
        }
    });
    return detail::bernoulli_estimate(tally.hits, trials, seed);
}

}  // namespace qcomp
