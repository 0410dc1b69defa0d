#include "gfuzz/learner.hpp"

namespace gfuzz {

void count_tree(const DerivationTree& tree, const Grammar& g, ChoiceCounts& into) {
  std::vector<const DerivationTree::Node*> stack{&tree.root};
  while (!stack.empty()) {
    const DerivationTree::Node* n = stack.back();
    stack.pop_back();
    if (n->is_leaf()) continue;
    int rule = g.rule_index(n->symbol);
    if (rule < 0)
      throw GrammarError("derivation tree references unknown nonterminal '" + n->symbol + "'");
    const Rule& r = g.rule_at(static_cast<size_t>(rule));
    if (n->choice < 0 || n->choice >= static_cast<int>(r.choices.size()))
      throw GrammarError("derivation tree references unknown choice " +
                         std::to_string(n->choice) + " of rule '" + n->symbol + "'");
    into.add(static_cast<size_t>(rule), static_cast<size_t>(n->choice));
    for (const auto& c : n->children) stack.push_back(&c);
  }
}

ChoiceCounts count_choices(const std::vector<DerivationTree>& trees, const Grammar& g) {
  ChoiceCounts counts(g);
  for (const DerivationTree& t : trees) count_tree(t, g, counts);
  return counts;
}

ProbabilisticGrammar learn_probabilities(const Grammar& g, const ChoiceCounts& counts) {
  if (counts.rule_count() != g.rule_count())
    throw GrammarError("choice counts do not match grammar shape");
  std::vector<std::vector<double>> probs;
  probs.reserve(g.rule_count());
  for (size_t i = 0; i < g.rule_count(); ++i) {
    size_t n = g.rule_at(i).choices.size();
    uint64_t total = counts.rule_total(i);
    std::vector<double> p(n, 0.0);
    if (total == 0) {
      for (double& v : p) v = 1.0 / static_cast<double>(n);
    } else {
      for (size_t c = 0; c < n; ++c)
        p[c] = static_cast<double>(counts.at(i, c)) / static_cast<double>(total);
    }
    probs.push_back(std::move(p));
  }
  return ProbabilisticGrammar(g, std::move(probs));
}

CorpusLearnResult learn_from_corpus(const Grammar& g, const std::vector<std::string>& texts) {
  EarleyParser parser(g);
  ChoiceCounts counts(g);
  std::vector<SeedParseStatus> statuses;
  statuses.reserve(texts.size());
  size_t parsed = 0;
  for (const std::string& text : texts) {
    try {
      DerivationTree tree = parser.parse(text);
      count_tree(tree, g, counts);
      statuses.push_back({true, ""});
      ++parsed;
    } catch (const ParseError& e) {
      statuses.push_back({false, e.what()});
    }
  }
  if (parsed == 0)
    throw GrammarError("no input in the corpus parses under the grammar");
  return CorpusLearnResult{learn_probabilities(g, counts), std::move(counts),
                           std::move(statuses), parsed, texts.size() - parsed};
}

}  // namespace gfuzz
