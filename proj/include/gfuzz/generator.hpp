#ifndef GFUZZ_GENERATOR_HPP
#define GFUZZ_GENERATOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfuzz/derivation.hpp"
#include "gfuzz/fitness.hpp"
#include "gfuzz/grammar.hpp"
#include "gfuzz/rng.hpp"

namespace gfuzz {

// One generated (or parsed) input together with its derivation statistics.
struct Individual {
  std::string text;
  uint64_t expansions = 0;  // rule-choice applications used to derive text
  uint64_t length = 0;      // character count of text
  int generation = 0;
  int index = 0;            // position within its population
  ChoiceCounts counts;      // per-(rule, choice) usage of this derivation
  std::optional<Fitness> fitness;
};

struct Population {
  std::vector<Individual> individuals;
  int generation = 0;
  size_t size() const { return individuals.size(); }
};

inline double expansion_ratio(const Individual& ind, const FitnessConfig& cfg) {
  return expansion_ratio(ind.expansions, ind.length, cfg);
}
inline double score_structure(const Individual& ind, const FitnessConfig& cfg) {
  return score_structure(ind.expansions, ind.length, cfg);
}

struct GeneratorLimits {
  int depth_limit = 64;
  // Hard cap on rule applications per derivation. Depth budgeting alone does
  // not bound tree width, and strongly recursive learned probabilities can
  // make expected sizes explode; past the cap the derivation is closed out
  // greedily along cheapest feasible choices (preferring ones with p > 0).
  uint64_t max_expansions = 50000;
};

// Weighted random derivation from a probabilistic grammar. Expands the
// leftmost nonterminal, sampling choices by probability. Choices whose
// symbols cannot terminate within the remaining depth budget are excluded
// and the probabilities renormalized over the rest.
class Generator {
 public:
  Generator(const ProbabilisticGrammar& pg, GeneratorLimits limits);

  // Deterministic function of the stream: same stream state, same output.
  Individual generate(Rng& rng) const;

  const ProbabilisticGrammar& pg() const { return *pg_; }
  const GeneratorLimits& limits() const { return limits_; }

 private:
  const ProbabilisticGrammar* pg_;
  GeneratorLimits limits_;
  std::vector<int> min_depth_;           // per rule index
  std::vector<std::vector<int>> choice_min_depth_;  // 1 + max child min depth
};

Individual generate_one(const ProbabilisticGrammar& pg, const GeneratorLimits& limits,
                        Rng& rng);

// Individual k of generation g draws from a sub-stream derived from
// (master_seed, g, k), so the population is identical no matter in which
// order or on how many workers the individuals are produced.
Population generate_population(const ProbabilisticGrammar& pg, size_t size,
                               const GeneratorLimits& limits, uint64_t master_seed,
                               int generation);

// File name for an exported individual: gen<generation>_<index>.input
std::string individual_file_name(int generation, int index);

}  // namespace gfuzz

#endif
