#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fscpu {

// Stream-mixing hash (splitmix64). Used to derive independent seeds for
// sub-streams, e.g. per-iteration candidate evaluations.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

// Deterministic random source: mt19937_64 (output sequence fixed by the
// standard) plus hand-rolled scalar transforms, so that a given seed yields
// the same stream regardless of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller transform; consumes exactly two uniforms per call.
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + stddev * r * std::cos(two_pi * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // First k entries of a partial Fisher-Yates shuffle of 0..n-1 (unsorted).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_int(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

    // Index draw proportional to non-negative weights; total must be > 0.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double x = uniform01() * total;
        double acc = 0.0;
        std::size_t last = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last = i;
            if (x < acc) return i;
        }
        return last;  // floating-point tail, return last feasible index
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fscpu
