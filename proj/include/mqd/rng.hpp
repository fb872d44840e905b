// Deterministic, platform-independent random streams.
//
// std::random distributions are not bit-stable across standard libraries, so
// sampling goes through an explicit splitmix64 stream plus inverse-CDF draws.
// Streams derived from (master, counter) pairs are independent, which lets
// trajectory generation parallelize without coordination.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace mqd::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from (master, counter).
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t s = master ^ (0xA24BAED4963EE407ULL * (counter + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Index drawn from an (approximately normalized) probability vector.
    std::size_t discrete(std::span<const double> probs) {
        double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    /// Geometric draw on {1,2,...} with P(j) = (1-q)^{j-1} q, via inverse CDF.
    long geometric(double q) {
        double u = uniform01();
        if (u <= 0.0) return 1;
        // P(theta <= j) = 1 - p^j, p = 1-q; smallest j with p^j <= 1-u.
        double log_p = std::log1p(-q);
        if (!(log_p < 0.0)) return 1; // q ~ 1
        double j = std::ceil(std::log1p(-u) / log_p);
        if (j < 1.0) return 1;
        if (j > 9.0e18) return static_cast<long>(9.0e18);
        return static_cast<long>(j);
    }

private:
    std::uint64_t state_;
};

} // namespace mqd::rng
