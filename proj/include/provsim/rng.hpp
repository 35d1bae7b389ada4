#pragma once

#include <cstdint>
#include <random>

namespace provsim {

// Named RNG substreams: one independent generator per (class, purpose) so
// different policies can be compared under common random numbers.
enum class StreamPurpose : std::uint64_t {
    SessionArrival = 1,
    JobArrival = 2,
    ServiceTime = 3,
    BurstPhase = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, int class_id, StreamPurpose purpose) {
    std::uint64_t s = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(class_id) + 1),
                               static_cast<std::uint64_t>(purpose));
    return std::mt19937_64(s);
}

} // namespace provsim
