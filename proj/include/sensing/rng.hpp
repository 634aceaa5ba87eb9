#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace sensing {

// Deterministic random stream with trial-indexed substreams, so Monte-Carlo
// results are reproducible under any execution order or thread count.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Independent substream for one trial of a seeded experiment.
  static RandomStream for_trial(std::uint64_t seed, std::uint64_t trial_index) {
    return RandomStream(seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1));
  }

  // Uniform on (0, 1]; never 0, so log() stays finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
  }

  // Uniform integer in [0, n), n >= 1.
  std::uint32_t uniform_index(std::uint32_t n) {
    if ((n & (n - 1)) == 0) {
      return static_cast<std::uint32_t>(engine_() & (n - 1));
    }
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  // |z|^2 is exponential with mean `variance` and the phase is uniform.
  std::complex<double> complex_gaussian(double variance) {
    const double mag = std::sqrt(-std::log(uniform()) * variance);
    const double phase = 2.0 * std::numbers::pi * uniform();
    return {mag * std::cos(phase), mag * std::sin(phase)};
  }

  // Standard normal (Box-Muller, cosine branch).
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

private:
  // splitmix64 finalizer; decorrelates consecutive seeds.
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace sensing
