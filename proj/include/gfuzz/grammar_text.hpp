#ifndef GFUZZ_GRAMMAR_TEXT_HPP
#define GFUZZ_GRAMMAR_TEXT_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "gfuzz/grammar.hpp"

namespace gfuzz {

// Grammar file format:
//
//   file   = rule* ;  rule = IDENT ":" choice ("|" choice)* ";"
//   choice = ["<" FLOAT ">"] symbol+ ;  symbol = IDENT | STRING
//   IDENT  = [A-Za-z_][A-Za-z0-9_]*
//   STRING = double-quoted, escapes \" \\ \n \t \r
//
// `//` starts a line comment; whitespace is insignificant outside strings.
// The lhs of the first rule is the start symbol. The optional <p> prefix
// carries a choice probability; plain grammar parsing ignores it.

struct GrammarSyntaxError : std::runtime_error {
  GrammarSyntaxError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  int line;
  int column;
};

// Parses the grammar, ignoring probability annotations. Errors: syntax error
// with line/column, undefined nonterminal, duplicate rule for the same lhs.
Grammar parse_grammar_text(std::string_view text);

// Parses the grammar together with its probability annotations. A rule with
// no annotated choice gets the uniform distribution; a partially annotated
// rule or a per-rule sum off by more than 1e-6 is an error. Annotated values
// are normalized by their exact sum so the simplex invariant holds.
ProbabilisticGrammar parse_probabilistic_grammar_text(std::string_view text);

// Inverse of the above; probabilities are printed with shortest round-trip
// formatting, so write -> parse reproduces them bit for bit.
std::string write_probabilistic_grammar_text(const ProbabilisticGrammar& pg);

std::string write_grammar_text(const Grammar& g);

}  // namespace gfuzz

#endif
