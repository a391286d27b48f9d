#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cdqkl::rng {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// All randomness in the project flows from one root seed through named
// substreams so that adding/removing one consumer never perturbs another.
inline std::uint64_t seed_for(std::uint64_t root, std::string_view stream) {
  return splitmix64(root ^ fnv1a(stream));
}

inline std::uint64_t seed_for(std::uint64_t root, std::string_view stream, std::uint64_t a) {
  return splitmix64(seed_for(root, stream) + 0x9e3779b97f4a7c15ull * (a + 1));
}

inline std::uint64_t seed_for(std::uint64_t root, std::string_view stream, std::uint64_t a,
                              std::uint64_t b) {
  return splitmix64(seed_for(root, stream, a) + 0xbf58476d1ce4e5b9ull * (b + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Uniform sample of `q` distinct indices from [0, n), returned sorted so a
// q == n draw reproduces the source order exactly.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t q,
                                                    std::mt19937_64& gen);

}  // namespace cdqkl::rng
