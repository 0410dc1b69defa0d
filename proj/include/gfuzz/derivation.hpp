#ifndef GFUZZ_DERIVATION_HPP
#define GFUZZ_DERIVATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gfuzz/grammar.hpp"

namespace gfuzz {

// One concrete derivation. Internal nodes record the applied (nonterminal,
// choice index); leaves carry terminal text. The left-to-right leaf
// concatenation reproduces the derived string exactly.
struct DerivationTree {
  struct Node {
    std::string symbol;  // nonterminal name, or terminal text when leaf
    int choice = -1;     // < 0 marks a terminal leaf
    std::vector<Node> children;
    bool is_leaf() const { return choice < 0; }
  };

  Node root;

  std::string yield() const;
  // Number of rule applications (internal nodes); terminals are not counted.
  uint64_t expansion_count() const;
};

// Per-(rule, choice) usage counters, shaped after a grammar: every pair is
// present, unused ones with count 0. Merging is element-wise addition.
class ChoiceCounts {
 public:
  ChoiceCounts() = default;
  explicit ChoiceCounts(const Grammar& g) {
    counts_.reserve(g.rule_count());
    for (const Rule& r : g.rules()) counts_.emplace_back(r.choices.size(), 0);
  }

  void add(size_t rule_idx, size_t choice_idx, uint64_t n = 1) {
    counts_.at(rule_idx).at(choice_idx) += n;
  }
  uint64_t at(size_t rule_idx, size_t choice_idx) const {
    return counts_.at(rule_idx).at(choice_idx);
  }
  uint64_t at(const Grammar& g, std::string_view lhs, size_t choice_idx) const {
    int i = g.rule_index(lhs);
    if (i < 0) throw GrammarError("no rule for nonterminal '" + std::string(lhs) + "'");
    return at(static_cast<size_t>(i), choice_idx);
  }

  uint64_t rule_total(size_t rule_idx) const {
    uint64_t t = 0;
    for (uint64_t c : counts_.at(rule_idx)) t += c;
    return t;
  }
  uint64_t total() const {
    uint64_t t = 0;
    for (size_t i = 0; i < counts_.size(); ++i) t += rule_total(i);
    return t;
  }

  void merge(const ChoiceCounts& other);

  size_t rule_count() const { return counts_.size(); }
  const std::vector<std::vector<uint64_t>>& table() const { return counts_; }

 private:
  std::vector<std::vector<uint64_t>> counts_;
};

}  // namespace gfuzz

#endif
