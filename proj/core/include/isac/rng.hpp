#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace isac {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 bits of entropy.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. Self-contained so that streams are
/// reproducible independent of the standard library implementation.
inline double gaussian(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Circularly symmetric complex Gaussian CN(0, var).
inline std::complex<double> complex_gaussian(Rng& rng, double var = 1.0) {
  const double s = std::sqrt(var / 2.0);
  const double re = gaussian(rng);
  const double im = gaussian(rng);
  return {s * re, s * im};
}

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix_seed(mix_seed(mix_seed(base ^ mix_seed(a)) ^ mix_seed(b)) ^ mix_seed(c));
}

}  // namespace isac
