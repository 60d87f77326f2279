#pragma once

#include <cmath>
#include <cstdint>

namespace twinzyg {

// splitmix64 finalizer; used both as a mixer and as a tiny PRNG for seeding.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a stream seed from (master seed, stage id, unit index) so that
// parallel units draw from disjoint, order-independent substreams.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stage,
                                    std::uint64_t unit) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ stage);
    s = splitmix64(s ^ unit);
    return s;
}

// xoshiro256** by Blackman/Vigna. Hand-rolled so that streams are
// bit-reproducible across standard libraries and platforms.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = splitmix64(s);
            w = s;
        }
        has_cached_gauss_ = false;
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) {
            return (x << k) | (x >> (64 - k));
        };
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the sampler is fixed by hand so a
    // given seed yields the same draws on every platform.
    double gaussian() {
        if (has_cached_gauss_) {
            has_cached_gauss_ = false;
            return cached_gauss_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * 3.141592653589793238462643383279502884 * u2;
        cached_gauss_ = r * std::sin(phi);
        has_cached_gauss_ = true;
        return r * std::cos(phi);
    }

    // Uniform integer in [0, n), n >= 1. Rejection-free modulo bias is
    // negligible for the index ranges used here, but reject anyway.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_[4];
    double cached_gauss_ = 0.0;
    bool has_cached_gauss_;
};

}  // namespace twinzyg
