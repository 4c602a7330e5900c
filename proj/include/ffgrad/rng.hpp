#pragma once

#include <cstdint>
#include <random>

namespace ffgrad {

inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stateless finalizer; mix64(x) is the first output of SplitMix64 seeded at x - golden.
inline uint64_t mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Replica i draws from the (i+1)-th output of SplitMix64 seeded with the master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t i) {
  uint64_t state = master + i * 0x9E3779B97F4A7C15ULL;
  return splitmix64_next(state);
}

inline double unit_from_bits(uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

// Maps 64 random bits to {0, ..., n-1} by the multiply-high reduction.
inline uint64_t bounded_from_bits(uint64_t bits, uint64_t n) {
  return uint64_t((static_cast<unsigned __int128>(bits) * n) >> 64);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  uint64_t bits() { return engine_(); }
  double uniform() { return unit_from_bits(engine_()); }
  uint64_t below(uint64_t n) { return bounded_from_bits(engine_(), n); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Randomness addressed by absolute time, so that re-running a window of
// past steps reproduces the same draws.
struct TimeStream {
  uint64_t seed;
  struct Draw {
    uint64_t index_bits;
    double u;
  };
  Draw at(int64_t t) const {
    uint64_t a = mix64(seed ^ mix64(static_cast<uint64_t>(t) + 0x632BE59BD9B4E019ULL));
    uint64_t b = mix64(a + 0x9E3779B97F4A7C15ULL);
    return {a, unit_from_bits(b)};
  }
};

}  // namespace ffgrad
