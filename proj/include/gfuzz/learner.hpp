#ifndef GFUZZ_LEARNER_HPP
#define GFUZZ_LEARNER_HPP

#include <string>
#include <vector>

#include "gfuzz/derivation.hpp"
#include "gfuzz/earley.hpp"
#include "gfuzz/grammar.hpp"

namespace gfuzz {

// Census of rule-choice applications over a set of derivation trees. Pairs
// never used are present with count 0.
ChoiceCounts count_choices(const std::vector<DerivationTree>& trees, const Grammar& g);
void count_tree(const DerivationTree& tree, const Grammar& g, ChoiceCounts& into);

// Relative-frequency estimate: for a rule with total count T > 0,
// p_i = count_i / T (zero counts stay exactly 0); rules never used fall back
// to the uniform distribution.
ProbabilisticGrammar learn_probabilities(const Grammar& g, const ChoiceCounts& counts);

struct SeedParseStatus {
  bool ok;
  std::string error;  // parse failure message when !ok
};

struct CorpusLearnResult {
  ProbabilisticGrammar pg;
  ChoiceCounts counts;
  std::vector<SeedParseStatus> statuses;  // one per input text, in order
  size_t parsed = 0;
  size_t failed = 0;
};

// Parses each text, counts choices over the successful parses, and learns
// probabilities. Unparseable texts are skipped and reported in statuses.
// Throws GrammarError if no text parses.
CorpusLearnResult learn_from_corpus(const Grammar& g, const std::vector<std::string>& texts);

}  // namespace gfuzz

#endif
