#pragma once
// Named, independently seeded RNG streams. Each (run seed, purpose, ids)
// tuple maps to its own generator, so e.g. adding relays to a scenario does
// not perturb the sensors' channel or fading draws.

#include <cstdint>
#include <random>
#include <string_view>

namespace lorarelay {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t stream_seed(std::uint64_t run_seed, std::string_view purpose,
                                 std::uint64_t id1 = 0, std::uint64_t id2 = 0) {
    std::uint64_t h = splitmix64(run_seed ^ fnv1a64(purpose));
    h = splitmix64(h ^ id1);
    h = splitmix64(h ^ id2);
    return h;
}

inline std::mt19937_64 make_stream(std::uint64_t run_seed, std::string_view purpose,
                                   std::uint64_t id1 = 0, std::uint64_t id2 = 0) {
    return std::mt19937_64(stream_seed(run_seed, purpose, id1, id2));
}

}  // namespace lorarelay
