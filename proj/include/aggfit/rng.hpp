#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace aggfit {

// SplitMix64 mixing step. Used to expand seeds and derive per-run streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a stream id
// (sweep rows, extended-run repeats). Stable across platforms.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

// Deterministic random stream. Every draw is a fixed transform of the raw
// mt19937_64 output, so sequences do not depend on standard-library
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // uniform on [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n), n >= 1
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // N(mean, sigma^2) via Box-Muller; consumes two uniforms per call
  double gaussian(double mean, double sigma) {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    return mean + sigma * z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aggfit
