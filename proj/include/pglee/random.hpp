#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pglee {

// std distributions are implementation-defined; these helpers only use the
// raw mt19937_64 stream so seeded runs agree across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline double standard_normal(Rng& rng) {
  const double r = std::sqrt(-2.0 * std::log(uniform01(rng)));
  return r * std::cos(2.0 * std::numbers::pi * uniform01(rng));
}

}  // namespace pglee
