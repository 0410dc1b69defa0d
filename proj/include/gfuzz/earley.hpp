#ifndef GFUZZ_EARLEY_HPP
#define GFUZZ_EARLEY_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gfuzz/derivation.hpp"
#include "gfuzz/grammar.hpp"

namespace gfuzz {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, size_t offset, std::vector<std::string> expected)
      : std::runtime_error(std::move(msg)), offset(offset), expected(std::move(expected)) {}
  size_t offset;                       // furthest byte reached
  std::vector<std::string> expected;   // terminals that could have continued
};

// Earley chart parser over byte positions. Handles any context-free grammar
// in the model, including ambiguity, left recursion, and epsilon choices
// (empty-terminal symbols and nullable chains via the Aycock-Horspool
// prediction step). Terminals scan their full literal text.
//
// Ambiguity is resolved deterministically when extracting the tree: choices
// are tried in ascending index order and, per symbol, shorter spans before
// longer ones; the first complete derivation wins.
class EarleyParser {
 public:
  explicit EarleyParser(const Grammar& g);

  // Returns the derivation tree whose yield equals input. Throws ParseError.
  DerivationTree parse(std::string_view input) const;

 private:
  const Grammar& grammar_;
  std::vector<bool> nullable_;  // per rule index
};

}  // namespace gfuzz

#endif
