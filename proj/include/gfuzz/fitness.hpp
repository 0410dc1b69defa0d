#ifndef GFUZZ_FITNESS_HPP
#define GFUZZ_FITNESS_HPP

#include <cstdint>

namespace gfuzz {

// Score of one individual. Ordering is lexicographic: any exception-
// triggering individual outranks every non-triggering one; ties are broken
// by the structure score. This realizes "exception implies maximum fitness"
// without infinite arithmetic and keeps the order total.
struct Fitness {
  bool exceptional = false;
  double structure = 0.0;

  friend bool operator<(const Fitness& a, const Fitness& b) {
    if (a.exceptional != b.exceptional) return !a.exceptional;
    return a.structure < b.structure;
  }
  friend bool operator>(const Fitness& a, const Fitness& b) { return b < a; }
  friend bool operator==(const Fitness& a, const Fitness& b) {
    return a.exceptional == b.exceptional && a.structure == b.structure;
  }
  friend bool operator<=(const Fitness& a, const Fitness& b) { return !(b < a); }
  friend bool operator>=(const Fitness& a, const Fitness& b) { return !(a < b); }
};

struct FitnessConfig {
  double lambda = 2.0;  // language-dependent weight on input length
};

// expansions / (lambda * length); empty inputs count as length 1.
inline double expansion_ratio(uint64_t expansions, uint64_t length,
                              const FitnessConfig& cfg) {
  uint64_t effective = length == 0 ? 1 : length;
  return static_cast<double>(expansions) /
         (cfg.lambda * static_cast<double>(effective));
}

// ratio * expansions: rewards derivations dense in rule applications.
inline double score_structure(uint64_t expansions, uint64_t length,
                              const FitnessConfig& cfg) {
  return expansion_ratio(expansions, length, cfg) * static_cast<double>(expansions);
}

}  // namespace gfuzz

#endif
