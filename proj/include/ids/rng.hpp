#pragma once

#include <cstdint>

namespace ids::rng {

// Counter-based generator. Every random quantity in the library is a pure
// function of (seed, stream, counter), so parallel sampling does not depend
// on evaluation order. The mixer is the splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of realization `index` derived from a base seed.
constexpr std::uint64_t realization_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return mix64(mix64(base_seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

// Independent streams under the same seed (occupancy, potential, geometry).
enum class Stream : std::uint64_t {
    occupancy = 1,
    potential = 2,
    geometry = 3,
};

constexpr std::uint64_t bits(std::uint64_t seed, Stream stream, std::uint64_t counter) noexcept {
    return mix64(mix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xa0761d6478bd642fULL)) + counter);
}

// Uniform double in [0,1) with 53 random bits.
constexpr double uniform(std::uint64_t seed, Stream stream, std::uint64_t counter) noexcept {
    return static_cast<double>(bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace ids::rng
