#pragma once

#include <cstdint>
#include <string_view>

// Counter-based randomness. Every random quantity in the library is a pure
// function of a 64-bit key and an entity id, so results never depend on
// iteration order or worker count.
//
//   mix64(x):  z = x + 0x9E3779B97F4A7C15
//              z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//              return z ^ (z >> 31)
//   hash(key, id) = mix64(key ^ mix64(id))
//   uniform(h)    = (h >> 11) * 2^-53            in [0, 1)
namespace srcloc {

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash(std::uint64_t key, std::uint64_t id) noexcept {
    return mix64(key ^ mix64(id));
}

constexpr double to_unit(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

constexpr double uniform(std::uint64_t key, std::uint64_t id) noexcept {
    return to_unit(hash(key, id));
}

// 64-bit FNV-1a, used to turn stream tags ("split", "sample") into ids.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Derives an independent sub-stream key from `key` for the given tag.
constexpr std::uint64_t substream(std::uint64_t key, std::string_view tag) noexcept {
    return hash(key, fnv1a(tag));
}

// Unbiased-enough bounded draw in [0, bound) via multiply-shift.
constexpr std::uint64_t bounded(std::uint64_t h, std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(h) * bound) >> 64);
}

struct RunKey {
    std::uint64_t value = 0;

    static constexpr RunKey derive(std::uint64_t master_seed, std::uint64_t index) noexcept {
        return RunKey{hash(master_seed, index)};
    }

    friend constexpr bool operator==(RunKey, RunKey) = default;
};

}  // namespace srcloc
