#pragma once

#include <cstdint>
#include <random>

namespace ncf {

// Independent RNG streams derived from one base seed. Changing how many
// dropout draws happen must not perturb the shuffle order, so each concern
// gets its own generator.
enum class Stream : std::uint64_t {
    init = 0x9e3779b97f4a7c15ULL,
    shuffle = 0xbf58476d1ce4e5b9ULL,
    dropout = 0x94d049bb133111ebULL,
    data = 0xd6e8feb86659fd93ULL,
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + salt;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream s) {
    return std::mt19937_64(mix_seed(seed, static_cast<std::uint64_t>(s)));
}

}  // namespace ncf
