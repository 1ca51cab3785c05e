#pragma once

// Seeding and sampling helpers. All draws go through these functions so that
// results are identical across standard library implementations.

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace onlinematch {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for sub-stream `index` of `master`. Trial t of an experiment always
// uses derive_seed(master, t), independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased draw from {0, ..., bound-1}; bound must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) noexcept {
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline std::vector<std::size_t> random_permutation(std::size_t n,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = k;
  for (std::size_t k = n; k > 1; --k) {
    std::size_t r = static_cast<std::size_t>(uniform_index(rng, k));
    std::swap(v[k - 1], v[r]);
  }
  return v;
}

}  // namespace onlinematch
