#pragma once

#include <cmath>
#include <cstdint>

namespace ebwlan {

/// splitmix64 (Steele/Lea/Vigna): used to expand one 64-bit seed into
/// independent substreams and to seed xoshiro state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// xoshiro256** (Blackman/Vigna). One instance per simulated station,
/// seeded from (run seed, station id) so replications and stations are
/// independent and reproducible.
class Xoshiro256ss {
public:
    Xoshiro256ss() : Xoshiro256ss(1, 0) {}

    Xoshiro256ss(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 sm(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
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

    /// Uniform in (0,1]; never 0 so -log stays finite.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound); Lemire multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) {
        while (true) {
            std::uint64_t x = next();
            unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
            auto lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= static_cast<std::uint64_t>(-bound) % bound)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace ebwlan
