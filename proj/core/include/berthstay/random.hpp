#pragma once

#include <cstdint>
#include <random>

namespace berthstay {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent substream seeds from a
// master seed so results do not depend on how work is split across threads.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
    return Rng{derive_seed(master, stream)};
}

}  // namespace berthstay
