#pragma once

// Seedable, splittable random streams with a fixed algorithm so results are
// bit-identical across compilers and standard libraries. The standard
// <random> distributions are implementation-defined, so bounded integers,
// uniform doubles and Poisson draws are implemented here.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace qcomp {

inline constexpr std::string_view kRngAlgorithm = "xoshiro256**/splitmix64-v1";
inline constexpr std::uint64_t kDefaultSeed = 42;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t state = seed;
        for (auto& word : s_) word = splitmix64(state);
    }

    /// Independent stream for one trial: a pure function of (seed, index).
    static RandomStream for_trial(std::uint64_t seed, std::uint64_t trial_index) {
        std::uint64_t state = seed;
        const std::uint64_t base = splitmix64(state);
        std::uint64_t mixed = base ^ (trial_index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        return RandomStream(splitmix64(mixed));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform integer in [0, bound), Lemire's multiply-and-reject method.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Poisson draw by multiplying uniforms (Knuth); fine for small means.
    std::uint64_t poisson(double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t count = 0;
        double product = uniform();
        while (product > limit) {
            ++count;
            product *= uniform();
        }
        return count;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
};

}  // namespace qcomp
