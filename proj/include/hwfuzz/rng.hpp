#pragma once

#include <cstdint>
#include <random>

namespace hwfuzz {

// SplitMix64 finalizer. Used to derive independent stream seeds from a base
// seed and a stream index so that trials, lock tables and workers never share
// generator state.
constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

// Thin wrapper over std::mt19937_64. The engine output sequence is fixed by
// the standard; bounded draws are done here rather than through
// std::uniform_int_distribution, whose algorithm differs between standard
// libraries.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t operator()() { return engine_(); }
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~uint64_t{0}; }

  // Uniform in [0, bound). bound == 0 returns 0.
  uint64_t below(uint64_t bound) {
    if (bound == 0) return 0;
    const uint64_t limit = max() - max() % bound;
    uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform in [lo, hi].
  uint64_t between(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

  // Low `bits` bits of one draw; bits in [0, 64].
  uint64_t bits(unsigned bits) {
    const uint64_t v = engine_();
    return bits >= 64 ? v : (v & ((uint64_t{1} << bits) - 1));
  }

  bool chance(uint64_t numerator, uint64_t denominator) {
    return below(denominator) < numerator;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hwfuzz
