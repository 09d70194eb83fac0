#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fockpres {

// splitmix64: cheap, well-mixed 64-bit hash used to derive independent
// substreams from (seed, index) pairs. Substreams make randomized checks
// reproducible regardless of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic generator: xoshiro-free, just splitmix64 iterated. The state
// transition and the double conversion below are fixed by this header, so
// results are identical on every platform.
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t index)
      : state_(splitmix64(splitmix64(seed) ^ (0x7f4a7c15ull + index * 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard Cauchy via inverse CDF, clamped to +-cap to keep downstream
  // polynomial coefficients inside double range. Heavy tails survive the
  // clamp: P(|x| > 1e6) is ~6e-7 to begin with.
  double cauchy(double cap = 1e6) {
    double x = std::tan(M_PI * (uniform01() - 0.5));
    if (x > cap) x = cap;
    if (x < -cap) x = -cap;
    return x;
  }

  // log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Standard normal (Box-Muller; one value per call, the partner is dropped
  // to keep the stream position independent of call parity).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Complex Gaussian with E|w|^2 = variance_total; real and imaginary parts
  // independent N(0, variance_total / 2).
  std::complex<double> complex_gaussian(double variance_total) {
    double s = std::sqrt(variance_total / 2.0);
    return {s * normal(), s * normal()};
  }

 private:
  std::uint64_t state_;
};

}  // namespace fockpres
