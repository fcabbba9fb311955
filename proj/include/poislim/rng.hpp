#pragma once

#include <cstdint>

namespace poislim {

/// Counter-based uniform generator built on the SplitMix64 output function
/// (Steele, Lea & Flood 2014). The value of stream `key` at counter index i is
///
///   splitmix64_at(key, i) = finalize(key + (i + 1) * 0x9e3779b97f4a7c15)
///
/// a pure function of (key, i), so any consumer can jump to an arbitrary
/// counter position. Splitting is plain arithmetic on the counter: replicate r
/// of a row with kn cells owns counter indices [r*kn, (r+1)*kn), one index per
/// cell. Runs are therefore reproducible independent of evaluation order.
inline std::uint64_t splitmix64_at(std::uint64_t key, std::uint64_t index) {
    std::uint64_t z = key + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A (key, counter) position in a SplitMix64 counter stream.
struct RngStream {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    std::uint64_t next_u64() { return splitmix64_at(key, counter++); }
    double next_unit() { return unit_double(next_u64()); }
};

} // namespace poislim
