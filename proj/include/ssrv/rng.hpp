#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

// Stream-splittable deterministic RNG.
//
// A stream is identified by (seed, stream_id). Child derivation is a pure
// function of the identifiers, never of how much of the parent has been
// consumed, so a loop that hands stream child(s) to iteration s produces
// the same draws no matter how iterations are scheduled across threads.
// The raw engine is std::mt19937_64 (bit-reproducible per the standard);
// all distribution transforms are implemented here rather than through
// std::*_distribution, whose outputs vary between standard libraries.

namespace ssrv {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Combines two stream identifiers. Not symmetric in its arguments.
inline std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), engine_(derive_stream(seed, stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Identity of the child depends only on (seed, stream_id, k).
    RngStream child(std::uint64_t k) const {
        return RngStream(seed_, derive_stream(stream_id_, k));
    }

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // (0, 1); safe under log().
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n); n >= 1. Lemire multiply-shift rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) {
            throw std::invalid_argument("uniform_int: n must be >= 1");
        }
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via Box-Muller (cosine branch only; no cached state).
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Gamma(shape, 1), shape > 0. Marsaglia-Tsang squeeze for shape >= 1;
    // shapes below 1 are boosted: draw Gamma(shape + 1) and scale by
    // U^(1/shape).
    double gamma(double shape) {
        if (!(shape > 0.0)) {
            throw std::invalid_argument("gamma: shape must be > 0");
        }
        if (shape < 1.0) {
            const double boosted = gamma(shape + 1.0);
            const double u = uniform_open();
            return boosted * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) {
                return d * v;
            }
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
                return d * v;
            }
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

// Fixed role constants for the analysis pipeline's substreams. Production
// and reference implementations both derive their per-draw streams from
// these, which is what makes them bit-comparable.
namespace streams {
inline constexpr std::uint64_t composition   = 0x636f6d70ull;  // Dirichlet draws: child(s).child(n)
inline constexpr std::uint64_t laplace_noise = 0x6c617031ull;  // child(s), one normal per draw
inline constexpr std::uint64_t bootstrap     = 0x626f6f74ull;  // child(s): child(0) columns, child(1) entries
inline constexpr std::uint64_t scale_prior   = 0x70726972ull;  // baseline scale-prior draws, child(s)
inline constexpr std::uint64_t generator     = 0x67656e00ull;  // synthetic data generation
}  // namespace streams

}  // namespace ssrv
