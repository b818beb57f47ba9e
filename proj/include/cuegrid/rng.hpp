#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cuegrid {

// All stochastic code draws from caller-owned streams so runs can be
// replayed bit-exactly. Derived quantities (uniform doubles, normals,
// bounded ints) are generated here rather than through std::*_distribution,
// whose output is implementation-defined.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Stream for agent `agent_index` inside the run seeded with `run_seed`.
inline Rng make_agent_rng(std::uint64_t run_seed, int agent_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(run_seed),
                    static_cast<std::uint32_t>(run_seed >> 32),
                    static_cast<std::uint32_t>(agent_index)};
  return Rng(seq);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be positive.
inline int uniform_int(Rng& rng, int n) {
  int i = static_cast<int>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

// Box-Muller without the cached spare, so the stream position is a pure
// function of the call count.
inline double normal(Rng& rng, double mean, double stddev) {
  double u1 = 1.0 - uniform01(rng);  // (0, 1], keeps log finite
  double u2 = uniform01(rng);
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace cuegrid
