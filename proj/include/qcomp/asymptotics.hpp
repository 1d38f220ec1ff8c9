#pragma once

// Large-network approximations: link-setup and compromise laws, the optimal
// overlap threshold for the two adversary models, and the critical design
// parameters for connectivity of the secure topology on the unit torus.
//
// Products of factorials and powers are evaluated in log space. Factorials
// are exact sums of logarithms since q stays small.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qcomp/errors.hpp"

namespace qcomp {

/// A numeric regime check that failed. Asymptotic values are still returned.
struct RegimeWarning {
    std::string code;
    std::string message;
};

using Warnings = std::vector<RegimeWarning>;

inline constexpr std::uint32_t kDefaultMaxThreshold = 64;

inline double log_factorial(std::uint32_t n) {
    double sum = 0.0;
    for (std::uint32_t i = 2; i <= n; ++i) sum += std::log(static_cast<double>(i));
    return sum;
}

namespace detail {
inline void warn(Warnings* sink, std::string code, std::string message) {
    if (sink) sink->push_back({std::move(code), std::move(message)});
}
}  // namespace detail

/// p_s ~ (K^2 / P)^q / q!
inline double link_probability_asymptotic(double ring, double pool, std::uint32_t threshold,
                                          Warnings* warnings = nullptr) {
    if (ring <= 0 || pool <= 0 || threshold < 1)
        throw InvalidParameter("link_probability_asymptotic needs K, P > 0 and q >= 1");
    if (ring * ring >= pool)
        detail::warn(warnings, "ring-squared-exceeds-pool",
                     "K^2 >= P: the asymptotic link probability is outside its regime");
    return std::exp(threshold * (2.0 * std::log(ring) - std::log(pool)) - log_factorial(threshold));
}

/// p_compromised ~ (mK / P)^q
inline double compromise_asymptotic(double captures, double ring, double pool, std::uint32_t threshold,
                                    Warnings* warnings = nullptr) {
    if (captures < 1 || ring <= 0 || pool <= 0 || threshold < 1)
        throw InvalidParameter("compromise_asymptotic needs m >= 1, K, P > 0 and q >= 1");
    if (captures >= std::sqrt(pool) / ring)
        detail::warn(warnings, "captures-exceed-regime",
                     "m >= sqrt(P)/K: the asymptotic compromise law is outside its regime");
    return std::exp(threshold * (std::log(captures) + std::log(ring) - std::log(pool)));
}

/// p_compromised / p_s ~ q! (m / K)^q
inline double compromise_ratio_asymptotic(double captures, double ring, std::uint32_t threshold) {
    if (captures < 1 || ring <= 0 || threshold < 1)
        throw InvalidParameter("compromise_ratio_asymptotic needs m >= 1, K > 0 and q >= 1");
    return std::exp(log_factorial(threshold) + threshold * (std::log(captures) - std::log(ring)));
}

struct OptimalThreshold {
    std::uint32_t q = 1;
    /// q - 1 minimizes equally well (K/m is an integer above 1).
    bool tie = false;
};

/// Minimizer of q! (m/K)^q for an adversary holding m captured nodes.
inline OptimalThreshold optimal_q_given_captures(std::uint64_t ring, std::uint64_t captures) {
    if (ring < 1 || captures < 1) throw InvalidParameter("optimal_q_given_captures needs K, m >= 1");
    const std::uint64_t quotient = ring / captures;
    if (quotient <= 1) return {1, false};
    return {static_cast<std::uint32_t>(quotient), ring % captures == 0};
}

/// An adversary who wants a fraction p_compromised of links, against a scheme
/// whose link probability is p_s.
struct BudgetAdversary {
    double target_fraction = 0.0;
    double link_probability = 0.0;
    std::uint32_t key_ring_size = 1;

    double ratio() const {
        if (!(target_fraction > 0.0) || target_fraction > 1.0)
            throw InvalidParameter("target compromise fraction must lie in (0, 1]");
        if (!(link_probability > 0.0) || link_probability > 1.0)
            throw InvalidParameter("link probability must lie in (0, 1]");
        return target_fraction / link_probability;
    }
};

/// (ln x - ln q!) / q, the log of the per-threshold capture multiplier.
inline double capture_exponent(double ratio, std::uint32_t threshold) {
    return (std::log(ratio) - log_factorial(threshold)) / threshold;
}

/// q# = argmax over q in [1, q_max] of (x / q!)^(1/q) for x = p_compromised / p_s.
/// Values within 1e-12 relative count as ties and go to the smaller q.
inline std::uint32_t optimal_q_for_ratio(double ratio, std::uint32_t max_threshold = kDefaultMaxThreshold) {
    if (!(ratio > 0.0)) throw InvalidParameter("compromise ratio must be positive");
    if (max_threshold < 1) throw InvalidParameter("q_max must be at least 1");
    std::uint32_t best_q = 1;
    double best = capture_exponent(ratio, 1);
    for (std::uint32_t q = 2; q <= max_threshold; ++q) {
        const double value = capture_exponent(ratio, q);
        if (value > best + 1e-12 * std::max(1.0, std::abs(best))) {
            best = value;
            best_q = q;
        }
    }
    return best_q;
}

inline std::uint32_t optimal_q_given_target(const BudgetAdversary& adversary,
                                            std::uint32_t max_threshold = kDefaultMaxThreshold) {
    return optimal_q_for_ratio(adversary.ratio(), max_threshold);
}

/// The ratio x at which q# switches between q and q + 1: q! / (q+1)^q.
inline double q_sharp_boundary(std::uint32_t threshold) {
    if (threshold < 1) throw InvalidParameter("q_sharp_boundary needs q >= 1");
    return std::exp(log_factorial(threshold) - threshold * std::log(threshold + 1.0));
}

/// Captures needed for the target fraction: K (x / q!)^(1/q).
inline double required_captures(const BudgetAdversary& adversary, std::uint32_t threshold) {
    if (threshold < 1) throw InvalidParameter("required_captures needs q >= 1");
    return adversary.key_ring_size * std::exp(capture_exponent(adversary.ratio(), threshold));
}

enum class CriticalUnknown { KeyRingSize, KeyPoolSize, Radius };

/// Inputs to the connectivity design rule. The field selected by `solve_for`
/// is ignored on input.
struct DesignGuidelineInput {
    std::uint64_t node_count = 0;
    std::uint64_t captured = 0;
    double key_ring_size = 0.0;
    double key_pool_size = 0.0;
    double radius = 0.0;
    std::uint32_t overlap_threshold = 1;
    CriticalUnknown solve_for = CriticalUnknown::Radius;

    std::uint64_t effective_nodes() const { return node_count - captured; }
};

/// ln(n) / n, the edge probability at the connectivity threshold.
inline double connectivity_threshold(double nodes) { return std::log(nodes) / nodes; }

/// (K^2/P)^q / q! * pi r^2, the asymptotic secure-link probability.
inline double secure_edge_probability_asymptotic(double ring, double pool, std::uint32_t threshold,
                                                 double radius) {
    return link_probability_asymptotic(ring, pool, threshold) * std::numbers::pi * radius * radius;
}

/// Solves (K^2/P)^q / q! * pi r^2 = ln(n-m)/(n-m) for the designated unknown.
inline double critical_parameter(const DesignGuidelineInput& input, Warnings* warnings = nullptr) {
    if (input.overlap_threshold < 1) throw InvalidParameter("q must be at least 1");
    if (input.captured >= input.node_count) throw InvalidParameter("need m < n");
    const std::uint64_t effective = input.effective_nodes();
    if (effective < 2) throw InvalidParameter("need n - m >= 2 surviving nodes");
    const bool need_radius = input.solve_for != CriticalUnknown::Radius;
    if (need_radius && !(input.radius > 0.0 && input.radius <= 0.5))
        throw InvalidParameter("transmission radius must lie in (0, 1/2]");
    if (input.solve_for != CriticalUnknown::KeyRingSize && !(input.key_ring_size > 0.0))
        throw InvalidParameter("key ring size must be positive");
    if (input.solve_for != CriticalUnknown::KeyPoolSize && !(input.key_pool_size > 0.0))
        throw InvalidParameter("key pool size must be positive");

    const double q = input.overlap_threshold;
    const double log_qfact = log_factorial(input.overlap_threshold);
    const double log_target = std::log(connectivity_threshold(static_cast<double>(effective)));
    const double log_pi = std::log(std::numbers::pi);

    double value = 0.0;
    switch (input.solve_for) {
        case CriticalUnknown::KeyRingSize:
            // K* = (q!/pi)^(1/2q) (ln n'/n')^(1/2q) P^(1/2) r^(-1/q)
            value = std::exp((log_qfact - log_pi + log_target) / (2.0 * q) +
                             0.5 * std::log(input.key_pool_size) - std::log(input.radius) / q);
            break;
        case CriticalUnknown::KeyPoolSize:
            // P* = (pi/q!)^(1/q) (n'/ln n')^(1/q) K^2 r^(2/q)
            value = std::exp((log_pi - log_qfact - log_target) / q + 2.0 * std::log(input.key_ring_size) +
                             2.0 * std::log(input.radius) / q);
            break;
        case CriticalUnknown::Radius:
            // r* = sqrt(q! ln n' / (pi n')) (P/K^2)^(q/2)
            value = std::exp(0.5 * (log_qfact + log_target - log_pi) +
                             0.5 * q * (std::log(input.key_pool_size) - 2.0 * std::log(input.key_ring_size)));
            if (value > 0.5)
                detail::warn(warnings, "radius-above-half",
                             "critical radius exceeds 1/2; the torus model no longer applies");
            break;
    }
    const double ring = input.solve_for == CriticalUnknown::KeyRingSize ? value : input.key_ring_size;
    const double pool = input.solve_for == CriticalUnknown::KeyPoolSize ? value : input.key_pool_size;
    if (ring * ring >= pool)
        detail::warn(warnings, "ring-squared-exceeds-pool",
                     "K^2 >= P at the critical point; the asymptotic link law is unreliable");
    return value;
}

}  // namespace qcomp
