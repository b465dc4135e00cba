#pragma once

#include <cstdint>
#include <random>

namespace cherryvine::detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent generator for row `row` of a computation seeded with `seed`.
inline std::mt19937_64 row_stream(std::uint64_t seed, std::uint64_t row) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(row + 1)));
}

/// Uniform draw strictly inside (0, 1) from 53 random bits; unlike
/// std::uniform_real_distribution its output is fixed by the standard
/// engine alone.
inline double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace cherryvine::detail
