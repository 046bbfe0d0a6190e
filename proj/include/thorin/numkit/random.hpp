#pragma once

// Deterministic random variates. Only the engine's raw 64-bit output is used
// (its sequence is fixed by the C++ standard), so streams reproduce across
// standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace thorin::numkit {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform on the open interval (0, 1).
inline double uniform_open(Engine& e) {
  return (static_cast<double>(e() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal by the Marsaglia polar method.
inline double standard_normal(Engine& e) {
  for (;;) {
    const double u = 2.0 * uniform_open(e) - 1.0;
    const double v = 2.0 * uniform_open(e) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Exponential with unit rate.
inline double standard_exponential(Engine& e) { return -std::log(uniform_open(e)); }

/// Gamma(shape, scale 1) by Marsaglia-Tsang squeeze/rejection; shapes below one
/// use G(a) = G(a + 1) * U^(1/a).
inline double standard_gamma(Engine& e, double shape) {
  if (shape < 1.0) {
    const double g = standard_gamma(e, shape + 1.0);
    const double u = uniform_open(e);
    return g * std::exp(std::log(u) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(e);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(e);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace thorin::numkit
