#ifndef GFUZZ_RNG_HPP
#define GFUZZ_RNG_HPP

#include <cstdint>
#include <random>

namespace gfuzz {

// splitmix64 finalizer; used to turn (seed, stream ids) into well-mixed
// engine seeds so that sub-streams derived from one master seed do not
// overlap in practice.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t substream_seed(uint64_t master, uint64_t a, uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) ^ b);
}

// Deterministic random stream. All sampling helpers are implemented on top
// of raw mt19937_64 output instead of <random> distributions, whose results
// are not pinned down by the standard; identical seeds therefore yield
// identical streams on any conforming platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1].
  double next_open_closed() { return 1.0 - next_double(); }

  // Uniform index in [0, n). n must be > 0.
  size_t next_index(size_t n) {
    return static_cast<size_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gfuzz

#endif
