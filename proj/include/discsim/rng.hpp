#pragma once
#include <cstdint>

namespace discsim {

/// splitmix64: used for seeding and for deriving independent streams.
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * xoshiro256++ generator with explicit splitting.
 *
 * Every random choice in the project flows from one configured seed through
 * this type. split(label) derives a child stream that is independent of the
 * parent's future output, so trials and sub-streams (positions, signs, ...)
 * stay reproducible regardless of evaluation order.
 */
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64_next(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// 53-bit uniform double in [0,1); never returns 1.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform sign in {-1,+1}.
    int next_sign() { return (next_u64() >> 63) ? +1 : -1; }

    /// Unbiased uniform integer in [0, bound).
    uint64_t next_below(uint64_t bound) {
        const uint64_t threshold = -bound % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Derive an independent child stream; deterministic in (state, label).
    Rng split(uint64_t label) {
        uint64_t sm = next_u64() ^ (0x5851f42d4c957f2dULL * (label + 1));
        return Rng(splitmix64_next(sm));
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

} // namespace discsim
