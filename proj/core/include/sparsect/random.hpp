#pragma once

#include <cstdint>
#include <random>

namespace sparsect {

/// Derives an independent stream seed from a root seed; used to give each
/// slice, iteration or diffusion step its own deterministic stream.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 seeded_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// Fills `out[0..n)` with i.i.d. N(0,1) draws, deterministic per seed.
inline void fill_standard_normal(double* out, std::size_t n, std::uint64_t seed) {
  auto eng = seeded_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) out[i] = gauss(eng);
}

}  // namespace sparsect
