#include "gfuzz/earley.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace gfuzz {

std::string DerivationTree::yield() const {
  std::string out;
  // Iterative DFS; generated trees can be deep.
  std::vector<const Node*> stack{&root};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->is_leaf()) {
      out += n->symbol;
      continue;
    }
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
      stack.push_back(&*it);
  }
  return out;
}

uint64_t DerivationTree::expansion_count() const {
  uint64_t count = 0;
  std::vector<const Node*> stack{&root};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->is_leaf()) continue;
    ++count;
    for (const Node& c : n->children) stack.push_back(&c);
  }
  return count;
}

void ChoiceCounts::merge(const ChoiceCounts& other) {
  if (other.counts_.size() != counts_.size())
    throw GrammarError("merging choice counts of different grammars");
  for (size_t i = 0; i < counts_.size(); ++i) {
    if (other.counts_[i].size() != counts_[i].size())
      throw GrammarError("merging choice counts of different grammars");
    for (size_t c = 0; c < counts_[i].size(); ++c)
      counts_[i][c] += other.counts_[i][c];
  }
}

namespace {

struct Item {
  int rule;
  int choice;
  int dot;
  int origin;
};

uint64_t item_key(const Item& it) {
  return (static_cast<uint64_t>(it.rule) << 48) ^
         (static_cast<uint64_t>(it.choice) << 40) ^
         (static_cast<uint64_t>(it.dot) << 32) ^ static_cast<uint64_t>(it.origin);
}

uint64_t span_key(int rule, int i, int j) {
  return (static_cast<uint64_t>(rule) << 48) ^ (static_cast<uint64_t>(i) << 24) ^
         static_cast<uint64_t>(j);
}

// A nonterminal is nullable iff some choice consists of nullable symbols
// only; the empty terminal is the nullable base case.
std::vector<bool> compute_nullable(const Grammar& g) {
  std::vector<bool> nullable(g.rule_count(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < g.rule_count(); ++i) {
      if (nullable[i]) continue;
      for (const Choice& c : g.rule_at(i).choices) {
        bool all = true;
        for (const Symbol& s : c.symbols) {
          if (s.is_terminal() ? !s.value.empty()
                              : !nullable[static_cast<size_t>(g.rule_index(s.value))]) {
            all = false;
            break;
          }
        }
        if (all) {
          nullable[i] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return nullable;
}

// Completed spans from the recognition pass: (rule, i, j) -> per-choice flag.
using CompletedMap = std::unordered_map<uint64_t, std::vector<bool>>;

class Reconstructor {
 public:
  Reconstructor(const Grammar& g, std::string_view input, const CompletedMap& completed)
      : grammar_(g), input_(input), completed_(completed) {}

  DerivationTree::Node build(int rule, int i, int j) {
    auto it = completed_.find(span_key(rule, i, j));
    assert(it != completed_.end());
    const Rule& r = grammar_.rule_at(static_cast<size_t>(rule));
    for (size_t c = 0; c < r.choices.size(); ++c) {
      if (!it->second[c]) continue;
      const std::vector<Symbol>& syms = r.choices[c].symbols;
      std::vector<int> ends(syms.size(), 0);
      if (!assign(rule, static_cast<int>(c), syms, 0, i, j, ends)) continue;
      DerivationTree::Node node;
      node.symbol = r.lhs;
      node.choice = static_cast<int>(c);
      int pos = i;
      for (size_t k = 0; k < syms.size(); ++k) {
        if (syms[k].is_terminal()) {
          DerivationTree::Node leaf;
          leaf.symbol = syms[k].value;
          leaf.choice = -1;
          node.children.push_back(std::move(leaf));
        } else {
          int r2 = grammar_.rule_index(syms[k].value);
          node.children.push_back(build(r2, pos, ends[k]));
        }
        pos = ends[k];
      }
      return node;
    }
    // A recorded span always admits at least one split.
    throw GrammarError("internal error: no derivation for recorded span");
  }

 private:
  // Can syms[k..] cover input[pos, j)? Fills ends[k..] on success. Lowest
  // choice index was already fixed by the caller; per symbol, shorter spans
  // are preferred. Failures are memoized globally (they are context-free).
  bool assign(int rule, int choice, const std::vector<Symbol>& syms, size_t k, int pos,
              int j, std::vector<int>& ends) {
    if (k == syms.size()) return pos == j;
    uint64_t fk = fail_key(rule, choice, k, pos, j);
    if (failed_.count(fk)) return false;
    const Symbol& s = syms[k];
    if (s.is_terminal()) {
      int len = static_cast<int>(s.value.size());
      if (pos + len <= j &&
          input_.compare(static_cast<size_t>(pos), s.value.size(), s.value) == 0 &&
          assign(rule, choice, syms, k + 1, pos + len, j, ends)) {
        ends[k] = pos + len;
        return true;
      }
    } else {
      int r2 = grammar_.rule_index(s.value);
      for (int end = pos; end <= j; ++end) {
        if (!completed_.count(span_key(r2, pos, end))) continue;
        if (assign(rule, choice, syms, k + 1, end, j, ends)) {
          ends[k] = end;
          return true;
        }
      }
    }
    failed_.insert(fk);
    return false;
  }

  static uint64_t fail_key(int rule, int choice, size_t k, int pos, int j) {
    return (static_cast<uint64_t>(rule) << 52) ^ (static_cast<uint64_t>(choice) << 46) ^
           (static_cast<uint64_t>(k) << 40) ^ (static_cast<uint64_t>(pos) << 20) ^
           static_cast<uint64_t>(j);
  }

  const Grammar& grammar_;
  std::string_view input_;
  const CompletedMap& completed_;
  std::unordered_set<uint64_t> failed_;
};

}  // namespace

EarleyParser::EarleyParser(const Grammar& g) : grammar_(g), nullable_(compute_nullable(g)) {
  for (const Rule& r : g.rules())
    for (const Choice& c : r.choices)
      for (const Symbol& s : c.symbols)
        if (!s.is_terminal() && g.rule_index(s.value) < 0)
          throw GrammarError("cannot parse with grammar: undefined nonterminal '" +
                             s.value + "'");
}

DerivationTree EarleyParser::parse(std::string_view input) const {
  const int n = static_cast<int>(input.size());
  const int start_rule = grammar_.rule_index(grammar_.start());
  if (start_rule < 0) throw GrammarError("start symbol has no rule");

  std::vector<std::vector<Item>> sets(static_cast<size_t>(n) + 1);
  std::vector<std::unordered_set<uint64_t>> seen(static_cast<size_t>(n) + 1);
  CompletedMap completed;

  auto add = [&](const Item& it, int set) {
    if (seen[static_cast<size_t>(set)].insert(item_key(it)).second)
      sets[static_cast<size_t>(set)].push_back(it);
  };

  const Rule& sr = grammar_.rule_at(static_cast<size_t>(start_rule));
  for (size_t c = 0; c < sr.choices.size(); ++c)
    add({start_rule, static_cast<int>(c), 0, 0}, 0);

  for (int k = 0; k <= n; ++k) {
    auto& set = sets[static_cast<size_t>(k)];
    for (size_t idx = 0; idx < set.size(); ++idx) {
      Item it = set[idx];
      const Choice& ch =
          grammar_.rule_at(static_cast<size_t>(it.rule)).choices[static_cast<size_t>(it.choice)];
      if (it.dot == static_cast<int>(ch.symbols.size())) {
        auto& flags = completed[span_key(it.rule, it.origin, k)];
        if (flags.empty())
          flags.resize(grammar_.rule_at(static_cast<size_t>(it.rule)).choices.size(), false);
        flags[static_cast<size_t>(it.choice)] = true;
        if (it.origin < k) {
          const std::string& lhs = grammar_.rule_at(static_cast<size_t>(it.rule)).lhs;
          for (const Item& wait : sets[static_cast<size_t>(it.origin)]) {
            const Choice& wch = grammar_.rule_at(static_cast<size_t>(wait.rule))
                                    .choices[static_cast<size_t>(wait.choice)];
            if (wait.dot < static_cast<int>(wch.symbols.size())) {
              const Symbol& ws = wch.symbols[static_cast<size_t>(wait.dot)];
              if (!ws.is_terminal() && ws.value == lhs)
                add({wait.rule, wait.choice, wait.dot + 1, wait.origin}, k);
            }
          }
        }
        // origin == k means an epsilon derivation; predictors were already
        // advanced by the nullable step below.
        continue;
      }
      const Symbol& s = ch.symbols[static_cast<size_t>(it.dot)];
      if (s.is_terminal()) {
        if (s.value.empty()) {
          add({it.rule, it.choice, it.dot + 1, it.origin}, k);
        } else {
          int len = static_cast<int>(s.value.size());
          if (k + len <= n &&
              input.compare(static_cast<size_t>(k), s.value.size(), s.value) == 0)
            add({it.rule, it.choice, it.dot + 1, it.origin}, k + len);
        }
      } else {
        int r2 = grammar_.rule_index(s.value);
        const Rule& pr = grammar_.rule_at(static_cast<size_t>(r2));
        for (size_t c = 0; c < pr.choices.size(); ++c)
          add({r2, static_cast<int>(c), 0, k}, k);
        if (nullable_[static_cast<size_t>(r2)])
          add({it.rule, it.choice, it.dot + 1, it.origin}, k);
      }
    }
  }

  if (completed.count(span_key(start_rule, 0, n))) {
    Reconstructor rec(grammar_, input, completed);
    DerivationTree tree;
    tree.root = rec.build(start_rule, 0, n);
    return tree;
  }

  // Furthest non-empty set is how far any derivation prefix reached.
  int furthest = 0;
  for (int k = n; k >= 0; --k) {
    if (!sets[static_cast<size_t>(k)].empty()) {
      furthest = k;
      break;
    }
  }
  std::set<std::string> expected;
  for (const Item& it : sets[static_cast<size_t>(furthest)]) {
    const Choice& ch =
        grammar_.rule_at(static_cast<size_t>(it.rule)).choices[static_cast<size_t>(it.choice)];
    if (it.dot < static_cast<int>(ch.symbols.size())) {
      const Symbol& s = ch.symbols[static_cast<size_t>(it.dot)];
      if (s.is_terminal() && !s.value.empty()) expected.insert(s.value);
    }
  }
  std::string msg = "parse failed at offset " + std::to_string(furthest);
  if (!expected.empty()) {
    msg += "; expected one of:";
    for (const std::string& e : expected) msg += " \"" + e + "\"";
  }
  throw ParseError(std::move(msg), static_cast<size_t>(furthest),
                   std::vector<std::string>(expected.begin(), expected.end()));
}

}  // namespace gfuzz
