#include "oscue/rng.hpp"

namespace oscue {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

CounterRng::CounterRng(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

std::uint64_t CounterRng::next_u64() {
  return mix64(key_ + (counter_++) * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(mix64(key_ ^ mix64(stream + kGolden)), 0);
}

}  // namespace oscue
