#pragma once

#include <cstdint>
#include <random>

namespace cfiot {

using Rng = std::mt19937_64;

// SplitMix64 step, used to whiten seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a2b79f82a5d5ULL;
    return z ^ (z >> 31);
}

// Derives an independent substream seed from (master, stream, index).
// Trial substreams depend only on their own index, so changing the trial
// count never perturbs earlier trials.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream,
                    std::uint64_t index = 0) {
    return Rng(derive_seed(master, stream, index));
}

}  // namespace cfiot
