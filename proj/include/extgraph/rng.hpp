#pragma once

#include <cstdint>
#include <random>

namespace extgraph {

using Engine = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent sub-seeds from a root seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return mix_seed(mix_seed(root) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(root, a), b);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(mix_seed(seed)); }

// Uniform draw on the open interval (0, 1).
inline double uniform_open(Engine& eng) {
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  double u;
  do {
    u = static_cast<double>(eng() >> 11) * scale;
  } while (u == 0.0);
  return u;
}

}  // namespace extgraph
