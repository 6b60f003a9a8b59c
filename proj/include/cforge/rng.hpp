#pragma once
#include <cstdint>

namespace cforge {

// splitmix64: tiny, fully specified, identical on every platform.
// std::uniform_int_distribution is implementation-defined, so we avoid it;
// modulo reduction is biased but bias is irrelevant for test sampling.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform-ish in [0, n)
  uint64_t below(uint64_t n) { return n ? next() % n : 0; }

  // uniform-ish in [lo, hi] inclusive
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool flip() { return (next() & 1) != 0; }

 private:
  uint64_t state_;
};

}  // namespace cforge
