#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace brl {

// Seeded generator with platform-independent draws. The standard library's
// distributions are implementation-defined, so uniform/normal sampling is done
// here on top of the (fully specified) mt19937_64 bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n), unbiased (rejection sampling). n must be > 0.
  std::size_t index(std::size_t n);

  // Independent child stream derived from this generator's next output.
  Rng split() { return Rng(mix(engine_())); }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace brl
