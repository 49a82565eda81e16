#pragma once

#include <cstdint>
#include <random>

namespace aggfield::rng {

/// Stream tags separating the random draws that share one (seed, index).
enum class Stream : std::uint64_t {
  noise = 0x6e6f697365ULL,
  theta = 0x7468657461ULL,
  replicate = 0x7265706cULL,
  spectrum = 0x73706563ULL,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key for the stream (seed, index, tag). A pure function of its arguments,
/// so replicate n gets the same draws no matter which thread produces it.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                 Stream tag) {
  std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t index, Stream tag) {
  const std::uint64_t key = derive_seed(seed, index, tag);
  std::seed_seq seq{static_cast<std::uint32_t>(key),
                    static_cast<std::uint32_t>(key >> 32)};
  return Engine(seq);
}

/// Uniform on the open interval (0, 1) with 53-bit resolution.
inline double uniform_open01(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace aggfield::rng
