#pragma once

#include <cstdint>
#include <random>

namespace latgap {

// splitmix64: used to derive independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t s = master_seed;
    for (std::uint64_t i = 0; i <= stream; ++i) splitmix64(s);
    return std::mt19937_64(s);
}

}  // namespace latgap
