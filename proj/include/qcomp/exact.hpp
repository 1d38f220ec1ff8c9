#pragma once

// Lossless finite-size probabilities of the q-composite key predistribution
// scheme: key-ring overlap, link setup, coverage of captured keys and the
// probability that a link between two non-captured sensors is compromised.
//
// Everything here is computed with GMP integers and rationals. The coverage
// distribution is an alternating inclusion-exclusion sum whose terms are many
// orders of magnitude larger than the result, so there is no floating-point
// path.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcomp/errors.hpp"

namespace qcomp {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Limits of the exact path. Work grows with the square of the number of keys
/// the captured nodes can hold, each term carrying an m-th power.
namespace capacity {
inline constexpr std::uint32_t kMaxPoolSize = 200'000;
inline constexpr std::uint32_t kMaxCaptures = 256;
inline constexpr std::uint32_t kMaxCapturedKeys = 4'096;  // bound on min(mK, P)
}  // namespace capacity

struct SchemeParams {
    std::uint32_t node_count = 0;  // 0 when only key-level quantities are needed
    std::uint32_t key_ring_size = 1;
    std::uint32_t key_pool_size = 1;
    std::uint32_t overlap_threshold = 1;

    void validate() const {
        if (overlap_threshold < 1 || key_ring_size < overlap_threshold ||
            key_pool_size < key_ring_size)
            throw InvalidParameter("scheme parameters must satisfy 1 <= q <= K <= P (q=" +
                                   std::to_string(overlap_threshold) +
                                   ", K=" + std::to_string(key_ring_size) +
                                   ", P=" + std::to_string(key_pool_size) + ")");
        if (key_pool_size > capacity::kMaxPoolSize)
            throw CapacityExceeded("key pool size " + std::to_string(key_pool_size) +
                                   " exceeds the exact-path limit " +
                                   std::to_string(capacity::kMaxPoolSize));
    }
};

/// A probability held as a reduced fraction of arbitrary-precision integers.
class ExactProbability {
public:
    ExactProbability() : value_(0) {}

    explicit ExactProbability(Rational value) : value_(std::move(value)) {
        value_.canonicalize();
        if (sgn(value_) < 0 || value_ > 1)
            throw DomainError("probability outside [0, 1]: " + value_.get_str());
    }

    static ExactProbability ratio(const BigInt& numerator, const BigInt& denominator) {
        if (sgn(denominator) == 0) throw DomainError("probability with zero denominator");
        return ExactProbability(Rational(numerator, denominator));
    }

    const Rational& value() const { return value_; }
    BigInt numerator() const { return value_.get_num(); }
    BigInt denominator() const { return value_.get_den(); }

    double to_double() const { return value_.get_d(); }
    std::string str() const { return value_.get_str(); }

    ExactProbability complement() const { return ExactProbability(Rational(1 - value_)); }

    friend ExactProbability operator*(const ExactProbability& a, const ExactProbability& b) {
        return ExactProbability(Rational(a.value_ * b.value_));
    }
    friend bool operator==(const ExactProbability& a, const ExactProbability& b) {
        return a.value_ == b.value_;
    }
    friend bool operator<(const ExactProbability& a, const ExactProbability& b) {
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExactProbability& a, const ExactProbability& b) {
        return a.value_ <= b.value_;
    }

private:
    Rational value_;
};

/// rho_u for u = 0..K: probability that two independent rings share exactly u keys.
struct OverlapDistribution {
    std::vector<ExactProbability> probabilities;

    const ExactProbability& operator[](std::size_t shared) const { return probabilities.at(shared); }
    std::size_t size() const { return probabilities.size(); }
};

/// A_tau: probability that m captured rings hold exactly tau distinct keys,
/// for tau in [K, min(mK, P)].
struct CoverageDistribution {
    std::uint32_t attack_size = 0;
    std::uint32_t min_keys = 0;
    std::vector<ExactProbability> probabilities;

    std::uint32_t max_keys() const {
        return min_keys + static_cast<std::uint32_t>(probabilities.size()) - 1;
    }
    /// Zero outside the support.
    ExactProbability at(std::uint32_t keys) const {
        if (keys < min_keys || keys > max_keys()) return ExactProbability();
        return probabilities[keys - min_keys];
    }
};

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline BigInt to_big(std::uint64_t value) { return BigInt(static_cast<unsigned long>(value)); }

inline BigInt power(const BigInt& base, std::uint64_t exponent) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
    return out;
}

inline Rational power(const Rational& base, std::uint64_t exponent) {
    Rational out(power(base.get_num(), exponent), power(base.get_den(), exponent));
    out.canonicalize();
    return out;
}

namespace detail {

inline void check_attack(const SchemeParams& params, std::uint32_t captures) {
    params.validate();
    if (captures < 1) throw InvalidParameter("number of captured nodes must be at least 1");
    if (captures > capacity::kMaxCaptures)
        throw CapacityExceeded("captured node count " + std::to_string(captures) +
                               " exceeds the exact-path limit " +
                               std::to_string(capacity::kMaxCaptures));
    const std::uint64_t union_keys = std::min<std::uint64_t>(
        std::uint64_t{captures} * params.key_ring_size, params.key_pool_size);
    if (union_keys > capacity::kMaxCapturedKeys)
        throw CapacityExceeded("min(mK, P) = " + std::to_string(union_keys) +
                               " exceeds the exact-path limit " +
                               std::to_string(capacity::kMaxCapturedKeys));
}

/// C(K, u) * C(P - K, K - u): the number of rings sharing exactly u keys with a
/// fixed ring. Dividing by C(P, K) gives rho_u.
inline std::vector<BigInt> overlap_counts(std::uint32_t ring, std::uint32_t pool) {
    std::vector<BigInt> counts(ring + 1);
    for (std::uint32_t u = 0; u <= ring; ++u)
        counts[u] = binomial(ring, u) * binomial(pool - ring, ring - u);
    return counts;
}

/// C(b, i) * C(P - b, K - i) summed over i < q: the number of
/// K-rings sharing fewer than q keys with a fixed b-subset.
inline BigInt low_overlap_count(std::uint32_t subset, std::uint32_t ring,
                                   std::uint32_t pool, std::uint32_t threshold) {
    BigInt total = 0;
    for (std::uint32_t i = 0; i < threshold && i <= ring; ++i)
        if (subset >= i && pool - subset >= ring - i)
            total += binomial(subset, i) * binomial(pool - subset, ring - i);
    return total;
}

}  // namespace detail

/// Number of ordered m-tuples of K-subsets of a tau-set whose union is the
/// whole tau-set, for every tau in [K, max_keys]. These counts do not depend
/// on the pool size, so one table serves every P.
class CoveringCounts {
public:
    CoveringCounts(std::uint32_t ring, std::uint32_t captures, std::uint32_t max_keys)
        : ring_(ring), captures_(captures) {
        if (ring < 1 || captures < 1) throw InvalidParameter("covering counts need K, m >= 1");
        max_keys = std::max(max_keys, ring);
        // tuples_[j - K] = C(j, K)^m: all m-tuples drawn inside a j-set.
        std::vector<BigInt> tuples;
        tuples.reserve(max_keys - ring + 1);
        for (std::uint32_t j = ring; j <= max_keys; ++j)
            tuples.push_back(power(binomial(j, ring), captures));

        counts_.reserve(max_keys - ring + 1);
        BigInt choose, term;
        for (std::uint32_t keys = ring; keys <= max_keys; ++keys) {
            // sum over excluded-set size l of (-1)^l C(keys, l) C(keys - l, K)^m
            BigInt total = 0;
            choose = 1;
            for (std::uint32_t excluded = 0; excluded <= keys - ring; ++excluded) {
                term = choose * tuples[keys - excluded - ring];
                if (excluded % 2 == 0)
                    total += term;
                else
                    total -= term;
                choose *= keys - excluded;
                mpz_divexact_ui(choose.get_mpz_t(), choose.get_mpz_t(), excluded + 1);
            }
            counts_.push_back(std::move(total));
        }
    }

    std::uint32_t ring_size() const { return ring_; }
    std::uint32_t captures() const { return captures_; }
    std::uint32_t max_keys() const { return ring_ + static_cast<std::uint32_t>(counts_.size()) - 1; }

    const BigInt& operator[](std::uint32_t keys) const { return counts_.at(keys - ring_); }

private:
    std::uint32_t ring_;
    std::uint32_t captures_;
    std::vector<BigInt> counts_;
};

namespace detail {

inline const CoveringCounts& select_counts(const CoveringCounts* cached, std::uint32_t ring,
                                           std::uint32_t captures, std::uint32_t max_keys,
                                           std::optional<CoveringCounts>& storage) {
    if (cached && cached->ring_size() == ring && cached->captures() == captures &&
        cached->max_keys() >= max_keys)
        return *cached;
    return storage.emplace(ring, captures, max_keys);
}

}  // namespace detail

inline OverlapDistribution overlap_distribution(const SchemeParams& params) {
    params.validate();
    const BigInt rings = binomial(params.key_pool_size, params.key_ring_size);
    OverlapDistribution out;
    for (const BigInt& count : detail::overlap_counts(params.key_ring_size, params.key_pool_size))
        out.probabilities.push_back(ExactProbability::ratio(count, rings));
    return out;
}

/// p_s: probability that two independent rings share at least q keys.
inline ExactProbability link_probability(const SchemeParams& params) {
    params.validate();
    const auto counts = detail::overlap_counts(params.key_ring_size, params.key_pool_size);
    BigInt linked = 0;
    for (std::uint32_t u = params.overlap_threshold; u <= params.key_ring_size; ++u)
        linked += counts[u];
    return ExactProbability::ratio(linked, binomial(params.key_pool_size, params.key_ring_size));
}

/// Smallest-error pool size for a target link probability. p_s is
/// nonincreasing in P, so a doubling bracket plus bisection finds the first P
/// with p_s(P) <= target; that P and its predecessor are the only candidates.
inline std::uint32_t find_pool_size(std::uint32_t ring, std::uint32_t threshold, double target) {
    if (!(target > 0.0) || target > 1.0)
        throw InvalidParameter("target link probability must lie in (0, 1]");
    SchemeParams params{0, ring, ring, threshold};
    params.validate();
    const Rational goal(target);
    auto ps_at = [&](std::uint32_t pool) {
        params.key_pool_size = pool;
        return link_probability(params).value();
    };

    // Invariant: p_s(low) > goal >= p_s(high).
    if (ps_at(ring) <= goal) return ring;
    std::uint64_t low = ring;
    std::uint64_t high = std::uint64_t{ring} * 2;
    while (true) {
        if (high >= capacity::kMaxPoolSize) {
            high = capacity::kMaxPoolSize;
            if (ps_at(static_cast<std::uint32_t>(high)) > goal)
                throw CapacityExceeded("target link probability needs a key pool above " +
                                       std::to_string(capacity::kMaxPoolSize));
            break;
        }
        if (ps_at(static_cast<std::uint32_t>(high)) <= goal) break;
        low = high;
        high *= 2;
    }
    while (high - low > 1) {
        const std::uint64_t mid = low + (high - low) / 2;
        if (ps_at(static_cast<std::uint32_t>(mid)) > goal)
            low = mid;
        else
            high = mid;
    }
    const Rational above_gap = ps_at(static_cast<std::uint32_t>(low)) - goal;
    const Rational below_gap = goal - ps_at(static_cast<std::uint32_t>(high));
    return static_cast<std::uint32_t>(above_gap <= below_gap ? low : high);
}

inline CoverageDistribution coverage_distribution(const SchemeParams& params, std::uint32_t captures,
                                                  const CoveringCounts* cached = nullptr) {
    detail::check_attack(params, captures);
    const std::uint32_t ring = params.key_ring_size;
    const std::uint32_t pool = params.key_pool_size;
    const std::uint32_t max_keys =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(std::uint64_t{captures} * ring, pool));

    std::optional<CoveringCounts> storage;
    const CoveringCounts& counts = detail::select_counts(cached, ring, captures, max_keys, storage);

    const BigInt tuples = power(binomial(pool, ring), captures);
    CoverageDistribution out;
    out.attack_size = captures;
    out.min_keys = ring;
    BigInt key_sets = binomial(pool, ring);  // C(P, tau)
    for (std::uint32_t keys = ring; keys <= max_keys; ++keys) {
        out.probabilities.push_back(ExactProbability::ratio(key_sets * counts[keys], tuples));
        key_sets *= pool - keys;
        mpz_divexact_ui(key_sets.get_mpz_t(), key_sets.get_mpz_t(), keys + 1);
    }
    return out;
}

/// A_{mK}: probability that the m captured rings are pairwise disjoint.
inline ExactProbability all_distinct_probability(const SchemeParams& params, std::uint32_t captures) {
    params.validate();
    if (captures < 1) throw InvalidParameter("number of captured nodes must be at least 1");
    const std::uint64_t ring = params.key_ring_size;
    const std::uint64_t pool = params.key_pool_size;
    if (captures * ring > pool)
        throw DomainError("m rings of size K cannot be disjoint when mK > P");
    BigInt disjoint = 1;
    for (std::uint64_t j = 0; j < captures; ++j) disjoint *= binomial(pool - j * ring, ring);
    return ExactProbability::ratio(disjoint, power(binomial(pool, ring), captures));
}

/// Probability that a link between two non-captured nodes is compromised
/// after m random captures, conditioned on the link existing. With
/// C(P, tau) C(tau, u) = C(P, u) C(P - u, tau - u) the whole expression
/// collapses to a single integer ratio:
///   sum_tau N_tau sum_{u>=q} C(P-u, tau-u) w_u  /  (C(P, K)^m sum_{u>=q} w_u)
/// where N_tau counts covering tuples and w_u counts rings with overlap u.
inline ExactProbability compromise_probability_exact(const SchemeParams& params, std::uint32_t captures,
                                                     const CoveringCounts* cached = nullptr) {
    detail::check_attack(params, captures);
    const std::uint32_t ring = params.key_ring_size;
    const std::uint32_t pool = params.key_pool_size;
    const std::uint32_t threshold = params.overlap_threshold;
    const std::uint32_t max_keys =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(std::uint64_t{captures} * ring, pool));

    const auto overlaps = detail::overlap_counts(ring, pool);
    BigInt linked = 0;
    for (std::uint32_t u = threshold; u <= ring; ++u) linked += overlaps[u];
    if (sgn(linked) == 0) throw DomainError("link probability is zero; compromise is undefined");

    std::optional<CoveringCounts> storage;
    const CoveringCounts& counts = detail::select_counts(cached, ring, captures, max_keys, storage);

    // weight[tau - K] = sum_{u>=q} C(P-u, tau-u) w_u
    std::vector<BigInt> weight(max_keys - ring + 1, 0);
    BigInt choose;
    for (std::uint32_t u = threshold; u <= ring; ++u) {
        if (sgn(overlaps[u]) == 0) continue;
        choose = binomial(pool - u, ring - u);
        for (std::uint32_t keys = ring; keys <= max_keys; ++keys) {
            weight[keys - ring] += choose * overlaps[u];
            const std::uint32_t chosen = keys - u;
            choose *= pool - u - chosen;
            mpz_divexact_ui(choose.get_mpz_t(), choose.get_mpz_t(), chosen + 1);
        }
    }

    BigInt numerator = 0;
    for (std::uint32_t keys = ring; keys <= max_keys; ++keys)
        numerator += counts[keys] * weight[keys - ring];
    const BigInt denominator = power(binomial(pool, ring), captures) * linked;
    return ExactProbability::ratio(numerator, denominator);
}

/// The widely cited closed form that treats each shared key as independently
/// captured with probability 1 - (1 - K/P)^m. It is not the correct
/// conditional probability and is kept only for comparison.
inline ExactProbability compromise_probability_chan(const SchemeParams& params, std::uint32_t captures) {
    params.validate();
    if (captures < 1) throw InvalidParameter("number of captured nodes must be at least 1");
    const std::uint32_t ring = params.key_ring_size;
    const std::uint32_t pool = params.key_pool_size;
    const auto overlaps = detail::overlap_counts(ring, pool);
    BigInt linked = 0;
    for (std::uint32_t u = params.overlap_threshold; u <= ring; ++u) linked += overlaps[u];
    if (sgn(linked) == 0) throw DomainError("link probability is zero; compromise is undefined");

    const Rational key_captured = 1 - power(Rational(to_big(pool - ring), to_big(pool)), captures);
    Rational total = 0;
    for (std::uint32_t u = params.overlap_threshold; u <= ring; ++u)
        total += power(key_captured, u) * Rational(overlaps[u], linked);
    return ExactProbability(total);
}

/// ((mK) / (P - K))^q, an upper bound on the exact compromise probability when
/// mK <= P. Undefined (infinite) when P = K.
inline Rational compromise_upper_bound(const SchemeParams& params, std::uint32_t captures) {
    params.validate();
    const std::uint64_t ring = params.key_ring_size;
    const std::uint64_t pool = params.key_pool_size;
    if (pool == ring) throw DomainError("upper bound needs P > K");
    return power(Rational(to_big(captures * ring), to_big(pool - ring)), params.overlap_threshold);
}

/// A_{mK} * C(mK, q) / C(P, q) * rho_q / p_s: the tau = mK, u = q term of the
/// exact sum, hence a lower bound when mK <= P.
inline Rational compromise_lower_bound(const SchemeParams& params, std::uint32_t captures) {
    const auto disjoint = all_distinct_probability(params, captures);
    const std::uint32_t ring = params.key_ring_size;
    const std::uint32_t pool = params.key_pool_size;
    const std::uint32_t threshold = params.overlap_threshold;
    const auto overlaps = detail::overlap_counts(ring, pool);
    BigInt linked = 0;
    for (std::uint32_t u = threshold; u <= ring; ++u) linked += overlaps[u];
    Rational bound = disjoint.value() *
                     Rational(binomial(std::uint64_t{captures} * ring, threshold), binomial(pool, threshold)) *
                     Rational(overlaps[threshold], linked);
    bound.canonicalize();
    return bound;
}

}  // namespace qcomp
