#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gfield {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream key from a seed and a list of identifiers; independent of call order.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = splitmix64(seed);
    for (auto id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    return Engine(stream_key(seed, ids));
}

// Stream tags, so fields, labels and noise never share a generator.
enum StreamTag : std::uint64_t { kTagField = 1, kTagLabels = 2, kTagNoise = 3, kTagTrial = 4 };

}  // namespace gfield
