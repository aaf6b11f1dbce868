#pragma once

#include <cmath>
#include <cstdint>

namespace smcl {

// SplitMix64 finalizer; bijective on 64-bit values with full avalanche.
constexpr uint64_t mix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based generator. Every draw is a pure function of
// (seed, stream ids, draw index), so per-particle / per-zone streams can be
// evaluated from any number of workers and still produce identical sequences.
class RandomStream
{
public:
    RandomStream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0)
        : key_(mix64(mix64(mix64(mix64(seed) ^ a) ^ b) ^ c))
    {
    }

    uint64_t next_bits()
    {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ull);
    }

    // [0, 1)
    double next_uniform()
    {
        return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one normal per two uniform draws, second value discarded so
    // the draw count per call stays fixed.
    double next_normal()
    {
        const double u1 = static_cast<double>((next_bits() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
    uint64_t next_index(uint64_t n)
    {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_bits()) * n) >> 64);
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

// Stream tags keep independent consumers of one seed from colliding.
namespace rng_tag {
inline constexpr uint64_t init_uniform = 1;
inline constexpr uint64_t motion = 2;
inline constexpr uint64_t resample = 3;
inline constexpr uint64_t reinject = 4;
inline constexpr uint64_t tof_noise = 5;
inline constexpr uint64_t detection = 6;
inline constexpr uint64_t false_positive = 7;
inline constexpr uint64_t odom_noise = 8;
} // namespace rng_tag

} // namespace smcl
