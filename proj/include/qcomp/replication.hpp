#pragma once

// Node replication attacks: c replicas each carrying b pool keys try to pair
// with benign neighbours (about d per replica). A replica succeeds with one
// neighbour when they share at least q keys.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "qcomp/asymptotics.hpp"
#include "qcomp/exact.hpp"

namespace qcomp {

struct ReplicationSpec {
    std::uint32_t keys_per_replica = 1;  // b
    std::uint64_t replica_count = 1;     // c
    std::uint64_t benign_density = 1;    // d
    SchemeParams scheme;

    void validate() const {
        scheme.validate();
        if (keys_per_replica < 1 || keys_per_replica > scheme.key_pool_size)
            throw InvalidParameter("keys per replica must lie in [1, P]");
        if (replica_count < 1) throw InvalidParameter("replica count must be at least 1");
        if (benign_density < 1) throw InvalidParameter("benign density must be at least 1");
    }
};

/// alpha: probability a benign ring shares fewer than q keys with the replica.
inline ExactProbability miss_probability(const ReplicationSpec& spec) {
    spec.validate();
    const SchemeParams& s = spec.scheme;
    return ExactProbability::ratio(
        detail::low_overlap_count(spec.keys_per_replica, s.key_ring_size, s.key_pool_size,
                                  s.overlap_threshold),
        binomial(s.key_pool_size, s.key_ring_size));
}

namespace detail {

/// ln(alpha) from the exact miss probability, accurate when alpha is near 1.
inline double log_miss(const ExactProbability& miss) {
    const double hit = miss.complement().to_double();
    return std::log1p(-hit);
}

inline double success_from_log_miss(double log_miss, double trials) {
    if (std::isinf(log_miss)) return 1.0;
    return -std::expm1(trials * log_miss);
}

}  // namespace detail

/// 1 - alpha^(cd).
inline double replication_success(const ReplicationSpec& spec) {
    const auto miss = miss_probability(spec);
    return detail::success_from_log_miss(
        detail::log_miss(miss),
        static_cast<double>(spec.replica_count) * static_cast<double>(spec.benign_density));
}

/// (cd / q!) (bK / P)^q
inline double replication_success_asymptotic(const ReplicationSpec& spec, Warnings* warnings = nullptr) {
    spec.validate();
    const SchemeParams& s = spec.scheme;
    const double spread = static_cast<double>(spec.keys_per_replica) * s.key_ring_size;
    if (spread * 10.0 > s.key_pool_size)
        detail::warn(warnings, "replica-keys-exceed-regime",
                     "bK is not much smaller than P; the asymptotic replication law is unreliable");
    return std::exp(std::log(static_cast<double>(spec.replica_count)) +
                    std::log(static_cast<double>(spec.benign_density)) - log_factorial(s.overlap_threshold) +
                    s.overlap_threshold * (std::log(spread) - std::log(static_cast<double>(s.key_pool_size))));
}

/// Smallest replica count c with 1 - alpha^(cd) >= target. The closed form
/// only seeds the search; the answer is certified by direct evaluation.
inline std::uint64_t min_replicas(double target, std::uint32_t keys_per_replica, std::uint64_t density,
                                  const SchemeParams& scheme) {
    if (!(target > 0.0 && target < 1.0)) throw InvalidParameter("target success must lie in (0, 1)");
    ReplicationSpec spec{keys_per_replica, 1, density, scheme};
    const auto miss = miss_probability(spec);
    if (miss.value() == 1) throw DomainError("replicas can never link (alpha = 1)");
    const double log_miss = detail::log_miss(miss);
    const double per_replica = static_cast<double>(density) * log_miss;
    auto reaches = [&](std::uint64_t replicas) {
        return detail::success_from_log_miss(log_miss, static_cast<double>(replicas) * density) >= target;
    };

    const double guess = std::ceil(std::log1p(-target) / per_replica);
    if (!(guess < 9e18)) throw CapacityExceeded("required replica count overflows 64 bits");
    std::uint64_t replicas = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(guess));
    while (replicas > 1 && reaches(replicas - 1)) --replicas;
    while (!reaches(replicas)) ++replicas;
    return replicas;
}

struct BudgetModel {
    double budget = 1.0;
    double key_cost_exponent = 1.0;      // p_b
    double replica_cost_exponent = 1.0;  // p_c

    void validate() const {
        if (!(budget >= 1.0)) throw InvalidParameter("budget must be at least 1");
        if (!(key_cost_exponent > 0.0) || !(replica_cost_exponent > 0.0))
            throw InvalidParameter("cost exponents must be positive");
    }
};

enum class AllocationRegime { FewRichReplicas, ManyPoorReplicas, Indifferent };

struct Allocation {
    std::uint64_t keys_per_replica = 1;  // b
    std::uint64_t replica_count = 1;     // c
    AllocationRegime regime = AllocationRegime::FewRichReplicas;
    /// p_b / p_c equals q, so the continuous problem has many optima.
    bool tie = false;
    /// The closed-form corner for the regime, before integer certification.
    std::uint64_t corner_keys = 1;
    std::uint64_t corner_replicas = 1;
};

namespace detail {

inline bool affordable(const BudgetModel& model, double keys, double replicas) {
    const double log_cost = model.key_cost_exponent * std::log(keys) +
                            model.replica_cost_exponent * std::log(replicas);
    return log_cost <= std::log(model.budget) + 1e-12 * std::max(1.0, std::log(model.budget));
}

/// Largest x >= 1 with x^exponent (times the fixed cost) within budget.
inline std::uint64_t max_affordable(const BudgetModel& model, bool keys_axis, double fixed) {
    const double exponent = keys_axis ? model.key_cost_exponent : model.replica_cost_exponent;
    const double other = keys_axis ? model.replica_cost_exponent : model.key_cost_exponent;
    double estimate = std::floor(std::exp((std::log(model.budget) - other * std::log(fixed)) / exponent));
    if (!(estimate < 9e18)) throw CapacityExceeded("allocation overflows 64 bits");
    auto x = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(estimate));
    auto fits = [&](std::uint64_t v) {
        return keys_axis ? affordable(model, static_cast<double>(v), fixed)
                         : affordable(model, fixed, static_cast<double>(v));
    };
    while (x > 1 && !fits(x)) --x;
    while (fits(x + 1)) ++x;
    return x;
}

}  // namespace detail

/// Above this many candidate b values the corner is returned uncertified.
inline constexpr std::uint64_t kMaxCertifiedKeys = 10'000'000;

/// Best (b, c) for maximizing b^q c under b^p_b c^p_c <= budget. The regime
/// follows from comparing p_b / p_c with q: spend everything on keys when the
/// ratio is below q, on replicas when above. Flooring can make a non-corner
/// integer point better, so the result is the integer maximizer, preferring
/// larger b among equals; the closed-form corner is reported alongside.
inline Allocation optimal_allocation(const BudgetModel& model, std::uint32_t threshold) {
    model.validate();
    if (threshold < 1) throw InvalidParameter("q must be at least 1");
    Allocation out;
    const double ratio = model.key_cost_exponent / model.replica_cost_exponent;
    const double q = threshold;
    if (std::abs(ratio - q) <= 1e-12 * q) {
        out.regime = AllocationRegime::Indifferent;
        out.tie = true;
    } else {
        out.regime = ratio < q ? AllocationRegime::FewRichReplicas : AllocationRegime::ManyPoorReplicas;
    }
    if (out.regime == AllocationRegime::ManyPoorReplicas) {
        out.corner_replicas = detail::max_affordable(model, false, 1.0);
    } else {
        out.corner_keys = detail::max_affordable(model, true, 1.0);
    }

    const std::uint64_t max_keys = detail::max_affordable(model, true, 1.0);
    if (max_keys > kMaxCertifiedKeys) {
        out.keys_per_replica = out.corner_keys;
        out.replica_count = out.corner_replicas;
        return out;
    }
    std::optional<double> best;
    for (std::uint64_t keys = max_keys; keys >= 1; --keys) {
        const std::uint64_t replicas = detail::max_affordable(model, false, static_cast<double>(keys));
        const double value = q * std::log(static_cast<double>(keys)) + std::log(static_cast<double>(replicas));
        if (!best || value > *best + 1e-12 * std::max(1.0, std::abs(*best))) {
            best = value;
            out.keys_per_replica = keys;
            out.replica_count = replicas;
        }
    }
    return out;
}

}  // namespace qcomp
