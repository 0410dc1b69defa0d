#include "gfuzz/generator.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace gfuzz {

Generator::Generator(const ProbabilisticGrammar& pg, GeneratorLimits limits)
    : pg_(&pg), limits_(limits) {
  const Grammar& g = pg.grammar();
  auto depth_by_name = min_expansion_depth(g);
  min_depth_.resize(g.rule_count());
  int max_depth = 0;
  for (size_t i = 0; i < g.rule_count(); ++i) {
    min_depth_[i] = depth_by_name.at(g.rule_at(i).lhs);
    max_depth = std::max(max_depth, min_depth_[i]);
  }
  if (limits_.depth_limit < max_depth)
    throw GrammarError("depth limit " + std::to_string(limits_.depth_limit) +
                       " is below the minimal expansion depth " + std::to_string(max_depth));

  choice_min_depth_.resize(g.rule_count());
  for (size_t i = 0; i < g.rule_count(); ++i) {
    const Rule& r = g.rule_at(i);
    choice_min_depth_[i].resize(r.choices.size());
    for (size_t c = 0; c < r.choices.size(); ++c) {
      int worst = 0;
      for (const Symbol& s : r.choices[c].symbols)
        if (!s.is_terminal())
          worst = std::max(worst, min_depth_[static_cast<size_t>(g.rule_index(s.value))]);
      choice_min_depth_[i][c] = 1 + worst;
    }
  }
}

Individual Generator::generate(Rng& rng) const {
  const Grammar& g = pg_->grammar();
  Individual ind;
  ind.counts = ChoiceCounts(g);

  struct Frame {
    int rule;
    int budget;
  };
  std::vector<Frame> stack;
  struct Pending {
    bool is_text;
    std::string_view text;
    int rule;
    int budget;
  };
  // Work items in leftmost order; nonterminal frames expand in place.
  std::vector<Pending> work;
  work.push_back({false, {}, g.rule_index(g.start()), limits_.depth_limit});

  bool closing = false;
  std::vector<size_t> feasible;
  while (!work.empty()) {
    Pending cur = work.back();
    work.pop_back();
    if (cur.is_text) {
      ind.text.append(cur.text);
      continue;
    }
    const size_t rule = static_cast<size_t>(cur.rule);
    const Rule& r = g.rule_at(rule);
    const std::vector<double>& probs = pg_->rule_probs(rule);

    feasible.clear();
    for (size_t c = 0; c < r.choices.size(); ++c)
      if (choice_min_depth_[rule][c] <= cur.budget) feasible.push_back(c);
    assert(!feasible.empty());  // every queued nonterminal has budget >= its min depth

    size_t chosen;
    if (closing) {
      // Close out the derivation along the cheapest route, keeping to
      // positive-probability choices where possible.
      chosen = feasible[0];
      int best = std::numeric_limits<int>::max();
      bool best_positive = false;
      for (size_t c : feasible) {
        bool positive = probs[c] > 0.0;
        int d = choice_min_depth_[rule][c];
        if ((positive && !best_positive) || (positive == best_positive && d < best)) {
          best = d;
          best_positive = positive;
          chosen = c;
        }
      }
    } else {
      double total = 0.0;
      for (size_t c : feasible) total += probs[c];
      if (total > 0.0) {
        double draw = rng.next_double() * total;
        double acc = 0.0;
        // Fallback for the draw rounding up to the full mass: the last
        // feasible choice with positive probability, never a zero one.
        chosen = feasible.back();
        for (size_t c : feasible)
          if (probs[c] > 0.0) chosen = c;
        for (size_t c : feasible) {
          acc += probs[c];
          if (draw < acc) {
            chosen = c;
            break;
          }
        }
      } else {
        // All feasible choices carry probability 0 (the whole mass sits on
        // choices too deep for the remaining budget): fall back to a uniform
        // draw over the feasible set.
        chosen = feasible[rng.next_index(feasible.size())];
      }
    }

    ind.counts.add(rule, chosen);
    ++ind.expansions;
    if (!closing && ind.expansions >= limits_.max_expansions) closing = true;

    const Choice& choice = r.choices[chosen];
    for (auto it = choice.symbols.rbegin(); it != choice.symbols.rend(); ++it) {
      if (it->is_terminal())
        work.push_back({true, std::string_view(it->value), 0, 0});
      else
        work.push_back({false, {}, g.rule_index(it->value), cur.budget - 1});
    }
  }

  ind.length = ind.text.size();
  return ind;
}

Individual generate_one(const ProbabilisticGrammar& pg, const GeneratorLimits& limits,
                        Rng& rng) {
  return Generator(pg, limits).generate(rng);
}

Population generate_population(const ProbabilisticGrammar& pg, size_t size,
                               const GeneratorLimits& limits, uint64_t master_seed,
                               int generation) {
  Generator gen(pg, limits);
  Population pop;
  pop.generation = generation;
  pop.individuals.reserve(size);
  for (size_t k = 0; k < size; ++k) {
    Rng rng(substream_seed(master_seed, static_cast<uint64_t>(generation), k));
    Individual ind = gen.generate(rng);
    ind.generation = generation;
    ind.index = static_cast<int>(k);
    pop.individuals.push_back(std::move(ind));
  }
  return pop;
}

std::string individual_file_name(int generation, int index) {
  return "gen" + std::to_string(generation) + "_" + std::to_string(index) + ".input";
}

}  // namespace gfuzz
