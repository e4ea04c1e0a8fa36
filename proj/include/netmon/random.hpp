#pragma once

#include <cstdint>
#include <random>

namespace netmon {

// Seeded stream used by every stochastic routine. The engine is fully
// specified by the standard, and the uniform mapping below avoids the
// implementation-defined std::*_distribution classes, so a seed produces
// the same sequence with any standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t raw() { return engine_(); }

  bool operator==(const RandomStream&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace netmon
