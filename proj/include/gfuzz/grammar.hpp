#ifndef GFUZZ_GRAMMAR_HPP
#define GFUZZ_GRAMMAR_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gfuzz {

struct GrammarError : std::runtime_error {
  explicit GrammarError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Symbol {
  enum class Kind { terminal, nonterminal };
  Kind kind;
  std::string value;  // terminal text (may be empty) or nonterminal name

  static Symbol term(std::string text) {
    return Symbol{Kind::terminal, std::move(text)};
  }
  static Symbol nonterm(std::string name) {
    return Symbol{Kind::nonterminal, std::move(name)};
  }
  bool is_terminal() const { return kind == Kind::terminal; }
  bool operator==(const Symbol&) const = default;
};

struct Choice {
  int index = 0;  // 0-based, contiguous within the owning rule
  std::vector<Symbol> symbols;
  bool operator==(const Choice&) const = default;
};

struct Rule {
  std::string lhs;
  std::vector<Choice> choices;
  bool operator==(const Rule&) const = default;
};

// Immutable context-free grammar. Rules keep source order; the first rule's
// lhs is the start symbol. Construction enforces the local invariants
// (unique lhs, contiguous choice indices, no duplicate choice bodies, sane
// epsilon placement); graph-level properties (definedness, reachability,
// productivity) are reported by validate().
class Grammar {
 public:
  static Grammar build(std::string start, std::vector<Rule> rules);

  const std::string& start() const { return start_; }
  const std::vector<Rule>& rules() const { return rules_; }
  size_t rule_count() const { return rules_.size(); }

  int rule_index(std::string_view lhs) const {
    auto it = index_.find(std::string(lhs));
    return it == index_.end() ? -1 : it->second;
  }
  const Rule* find_rule(std::string_view lhs) const {
    int i = rule_index(lhs);
    return i < 0 ? nullptr : &rules_[static_cast<size_t>(i)];
  }
  const Rule& rule(std::string_view lhs) const {
    const Rule* r = find_rule(lhs);
    if (!r) throw GrammarError("no rule for nonterminal '" + std::string(lhs) + "'");
    return *r;
  }
  const Rule& rule_at(size_t idx) const { return rules_.at(idx); }

 private:
  Grammar() = default;
  std::string start_;
  std::vector<Rule> rules_;
  std::unordered_map<std::string, int> index_;
};

struct Finding {
  enum class Category { missing_start, undefined_nonterminal, unreachable, unproductive };
  Category category;
  std::string nonterminal;
  std::string message;
};

// Empty result iff the grammar graph is well formed: start defined, every
// referenced nonterminal has a rule, every rule reachable from start, and
// every nonterminal derives some finite terminal string.
std::vector<Finding> validate(const Grammar& g);

// Least k such that the nonterminal derives a terminal-only string with a
// derivation tree of height <= k. Throws GrammarError if some nonterminal is
// unproductive (validate reports those).
std::map<std::string, int> min_expansion_depth(const Grammar& g);

// Grammar plus one probability per rule choice. Per-rule probabilities are
// validated at construction: each in [0,1], summing to 1 within 1e-9.
class ProbabilisticGrammar {
 public:
  static constexpr double kSimplexTolerance = 1e-9;

  ProbabilisticGrammar(Grammar grammar, std::vector<std::vector<double>> probs);

  const Grammar& grammar() const { return grammar_; }
  const std::vector<std::vector<double>>& probs() const { return probs_; }
  const std::vector<double>& rule_probs(size_t rule_idx) const {
    return probs_.at(rule_idx);
  }
  double prob(size_t rule_idx, size_t choice_idx) const {
    return probs_.at(rule_idx).at(choice_idx);
  }
  double prob(std::string_view lhs, size_t choice_idx) const;

 private:
  Grammar grammar_;
  std::vector<std::vector<double>> probs_;
};

// p = 1/n for every rule with n choices.
ProbabilisticGrammar uniform_probabilities(const Grammar& g);

}  // namespace gfuzz

#endif
