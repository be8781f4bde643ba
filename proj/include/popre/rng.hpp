#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace popre {

// Seedable generator with explicit stream forking so parallel workers get
// independent, scheduling-invariant randomness.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform index in [0, bound).
  std::size_t index(std::size_t bound) {
    return static_cast<std::size_t>(next_double() * static_cast<double>(bound)) % bound;
  }

  // Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    double u = next_double();
    while (u <= 0.0) u = next_double();
    const double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
  }

  // Independent generator derived from this seed and a stream id.
  static Rng fork(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace popre
