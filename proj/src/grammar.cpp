#include "gfuzz/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace gfuzz {

Grammar Grammar::build(std::string start, std::vector<Rule> rules) {
  Grammar g;
  g.start_ = std::move(start);
  g.rules_ = std::move(rules);
  for (size_t i = 0; i < g.rules_.size(); ++i) {
    Rule& r = g.rules_[i];
    if (r.lhs.empty()) throw GrammarError("rule with empty lhs");
    if (r.choices.empty())
      throw GrammarError("rule '" + r.lhs + "' has no choices");
    if (!g.index_.emplace(r.lhs, static_cast<int>(i)).second)
      throw GrammarError("duplicate rule for nonterminal '" + r.lhs + "'");
    for (size_t c = 0; c < r.choices.size(); ++c) {
      Choice& ch = r.choices[c];
      if (ch.index != static_cast<int>(c))
        throw GrammarError("rule '" + r.lhs + "': choice indices not contiguous");
      if (ch.symbols.empty())
        throw GrammarError("rule '" + r.lhs + "': empty choice");
      for (const Symbol& s : ch.symbols) {
        if (s.is_terminal() && s.value.empty() && ch.symbols.size() != 1)
          throw GrammarError("rule '" + r.lhs +
                             "': empty terminal must be the sole symbol of its choice");
        if (!s.is_terminal() && s.value.empty())
          throw GrammarError("rule '" + r.lhs + "': empty nonterminal name");
      }
      for (size_t d = 0; d < c; ++d)
        if (r.choices[d].symbols == ch.symbols)
          throw GrammarError("rule '" + r.lhs + "': duplicate choice bodies " +
                             std::to_string(d) + " and " + std::to_string(c));
    }
  }
  return g;
}

namespace {

// Nonterminals that derive some finite terminal string. Least fixpoint.
std::set<std::string> productive_set(const Grammar& g) {
  std::set<std::string> productive;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      if (productive.count(r.lhs)) continue;
      for (const Choice& c : r.choices) {
        bool ok = true;
        for (const Symbol& s : c.symbols) {
          if (!s.is_terminal() && !productive.count(s.value)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          productive.insert(r.lhs);
          changed = true;
          break;
        }
      }
    }
  }
  return productive;
}

}  // namespace

std::vector<Finding> validate(const Grammar& g) {
  std::vector<Finding> findings;
  if (!g.find_rule(g.start()))
    findings.push_back({Finding::Category::missing_start, g.start(),
                        "start symbol '" + g.start() + "' has no rule"});

  std::set<std::string> reported_undefined;
  for (const Rule& r : g.rules())
    for (const Choice& c : r.choices)
      for (const Symbol& s : c.symbols)
        if (!s.is_terminal() && !g.find_rule(s.value) &&
            reported_undefined.insert(s.value).second)
          findings.push_back({Finding::Category::undefined_nonterminal, s.value,
                              "nonterminal '" + s.value + "' referenced in rule '" +
                                  r.lhs + "' has no rule"});

  // Reachability from start over defined rules.
  std::set<std::string> reachable;
  std::deque<std::string> queue;
  if (g.find_rule(g.start())) {
    reachable.insert(g.start());
    queue.push_back(g.start());
  }
  while (!queue.empty()) {
    const Rule& r = g.rule(queue.front());
    queue.pop_front();
    for (const Choice& c : r.choices)
      for (const Symbol& s : c.symbols)
        if (!s.is_terminal() && g.find_rule(s.value) && reachable.insert(s.value).second)
          queue.push_back(s.value);
  }
  for (const Rule& r : g.rules())
    if (!reachable.count(r.lhs))
      findings.push_back({Finding::Category::unreachable, r.lhs,
                          "nonterminal '" + r.lhs + "' is not reachable from start"});

  std::set<std::string> productive = productive_set(g);
  for (const Rule& r : g.rules())
    if (!productive.count(r.lhs))
      findings.push_back({Finding::Category::unproductive, r.lhs,
                          "nonterminal '" + r.lhs + "' derives no finite terminal string"});
  return findings;
}

std::map<std::string, int> min_expansion_depth(const Grammar& g) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::map<std::string, int> depth;
  for (const Rule& r : g.rules()) depth[r.lhs] = kInf;

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      int best = kInf;
      for (const Choice& c : r.choices) {
        int worst_child = 0;
        bool feasible = true;
        for (const Symbol& s : c.symbols) {
          if (s.is_terminal()) continue;
          auto it = depth.find(s.value);
          if (it == depth.end() || it->second >= kInf) {
            feasible = false;
            break;
          }
          worst_child = std::max(worst_child, it->second);
        }
        if (feasible) best = std::min(best, 1 + worst_child);
      }
      if (best < depth[r.lhs]) {
        depth[r.lhs] = best;
        changed = true;
      }
    }
  }

  std::string unproductive;
  for (const auto& [nt, d] : depth)
    if (d >= kInf) unproductive += (unproductive.empty() ? "" : ", ") + nt;
  if (!unproductive.empty())
    throw GrammarError("min_expansion_depth undefined for unproductive nonterminals: " +
                       unproductive);
  return depth;
}

ProbabilisticGrammar::ProbabilisticGrammar(Grammar grammar,
                                           std::vector<std::vector<double>> probs)
    : grammar_(std::move(grammar)), probs_(std::move(probs)) {
  if (probs_.size() != grammar_.rule_count())
    throw GrammarError("probability table does not match rule count");
  for (size_t i = 0; i < probs_.size(); ++i) {
    const Rule& r = grammar_.rule_at(i);
    if (probs_[i].size() != r.choices.size())
      throw GrammarError("rule '" + r.lhs + "': probability count does not match choices");
    double sum = 0.0;
    for (double p : probs_[i]) {
      if (!(p >= 0.0 && p <= 1.0))
        throw GrammarError("rule '" + r.lhs + "': probability out of [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw GrammarError("rule '" + r.lhs + "': probabilities sum to " +
                         std::to_string(sum) + ", not 1");
  }
}

double ProbabilisticGrammar::prob(std::string_view lhs, size_t choice_idx) const {
  int i = grammar_.rule_index(lhs);
  if (i < 0) throw GrammarError("no rule for nonterminal '" + std::string(lhs) + "'");
  return prob(static_cast<size_t>(i), choice_idx);
}

ProbabilisticGrammar uniform_probabilities(const Grammar& g) {
  std::vector<std::vector<double>> probs;
  probs.reserve(g.rule_count());
  for (const Rule& r : g.rules())
    probs.emplace_back(r.choices.size(), 1.0 / static_cast<double>(r.choices.size()));
  return ProbabilisticGrammar(g, std::move(probs));
}

}  // namespace gfuzz
