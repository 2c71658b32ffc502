#pragma once

#include <cstdint>

namespace oscue {

// Counter-based generator: out(i) = mix64(key + i*GAMMA) with the splitmix64
// finalizer.  Streams derived via split() are statistically independent and
// the whole tree is reproducible from the root seed, independent of call
// interleaving across components.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Child generator for an independent named stream.
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t key() const { return key_; }

  static std::uint64_t mix64(std::uint64_t z);

 private:
  CounterRng(std::uint64_t key, int /*tag*/) : key_(key) {}
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace oscue
