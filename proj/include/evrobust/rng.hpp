#pragma once

#include <cmath>
#include <cstdint>

namespace evrobust {

// Counter-based pseudo-random generator (splitmix64 core).
//
// Every stream is a pure function of (seed, stream ids, counter), so work can be
// partitioned across threads by key instead of by generator state: two runs with
// the same keys produce the same draws no matter how the loop is scheduled.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : state_(mix(seed ^ kGamma)) {}

    CounterRng(std::uint64_t seed, std::uint64_t s0) : CounterRng(seed) { fold(s0); }

    CounterRng(std::uint64_t seed, std::uint64_t s0, std::uint64_t s1) : CounterRng(seed, s0) { fold(s1); }

    CounterRng(std::uint64_t seed, std::uint64_t s0, std::uint64_t s1, std::uint64_t s2)
        : CounterRng(seed, s0, s1) {
        fold(s2);
    }

    // Derive an independent substream keyed by `id`.
    CounterRng substream(std::uint64_t id) const {
        CounterRng r(*this);
        r.fold(id);
        return r;
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return finalize(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased integer in [0, n) via 128-bit multiply (bias < n / 2^64).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal, Box-Muller (cosine branch only so each draw costs two uniforms).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Poisson draw; exact for all lambda >= 0 (Knuth product for small rates,
    // Hormann's PTRS transformed rejection above that).
    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 10.0) return poisson_knuth(lambda);
        return poisson_ptrs(lambda);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t z) { return finalize(z + kGamma); }

    void fold(std::uint64_t id) { state_ = mix(state_ ^ mix(id)); }

    std::uint64_t poisson_knuth(double lambda) {
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t poisson_ptrs(double lambda) {
        const double slam = std::sqrt(lambda);
        const double loglam = std::log(lambda);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform_pos();
            const double us = 0.5 - std::abs(u);
            const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
                k * loglam - lambda - std::lgamma(k + 1.0)) {
                return static_cast<std::uint64_t>(k);
            }
        }
    }

    std::uint64_t state_;
};

// 64-bit FNV-1a, used for config hashes and output-manifest checksums.
inline std::uint64_t fnv1a64(const void* bytes, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace evrobust
