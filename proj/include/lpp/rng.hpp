#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lpp {

/** SplitMix64 finalizer; a bijective 64-bit mixing function. */
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Counter-style generator keyed by (seed, stream, index). Each key gives an
 * independent SplitMix64 sequence, so a Monte Carlo sample depends only on its
 * own index and never on which thread drew it.
 */
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : state_(mix64(mix64(mix64(seed) ^ stream) ^ index)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /** Uniform on (0, 1], never zero. */
  double uniform_open0() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  /** Mean-one exponential variate by inversion. */
  double exponential() { return -std::log(uniform_open0()); }

  /** Geometric variate with P(k) = (1-q) q^k for k >= 0. */
  double geometric(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("geometric: q must lie in (0,1)");
    return std::floor(std::log(uniform_open0()) / std::log(q));
  }

 private:
  std::uint64_t state_;
};

}  // namespace lpp
