#pragma once

#include <cstdint>
#include <random>

// All randomness flows from explicit 64-bit seeds. The engine is mt19937_64
// (output sequence fixed by the standard); the distribution algorithms live
// here so that sampled values are identical across standard libraries.
//
// Seed derivation tree: every parallel or per-item stream uses
// derive_seed(parent_seed, stream_index), a splitmix64 step of
// parent ^ golden_gamma*(index+1). Never reuse a parent seed directly for two
// different streams.

namespace fbq {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  std::uint64_t s = parent ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  return std::mt19937_64(splitmix64(s));
}

// Uniform on [0,1) with 53-bit resolution.
inline double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; consumes exactly two uniforms per pair, caller keeps no state.
double normal_sample(std::mt19937_64& rng, double mean = 0.0, double stddev = 1.0);

// Exact Poisson sampling: sequential inversion for small means, Hormann's
// PTRS transformed rejection for large ones.
std::int64_t poisson_sample(std::mt19937_64& rng, double mean);

}  // namespace fbq
