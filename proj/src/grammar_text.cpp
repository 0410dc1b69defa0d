#include "gfuzz/grammar_text.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>

namespace gfuzz {

namespace {

struct Token {
  enum class Kind { ident, string, colon, pipe, semicolon, langle, rangle, number, eof };
  Kind kind;
  std::string text;   // ident name, string contents (unescaped), or number text
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws_and_comments();
    int line = line_, col = col_;
    if (pos_ >= src_.size()) return {Token::Kind::eof, "", line, col};
    char c = src_[pos_];
    switch (c) {
      case ':': advance(); return {Token::Kind::colon, ":", line, col};
      case '|': advance(); return {Token::Kind::pipe, "|", line, col};
      case ';': advance(); return {Token::Kind::semicolon, ";", line, col};
      case '<': advance(); return {Token::Kind::langle, "<", line, col};
      case '>': advance(); return {Token::Kind::rangle, ">", line, col};
      case '"': return lex_string(line, col);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(line, col);
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+')
      return lex_number(line, col);
    throw GrammarSyntaxError(line, col, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex_ident(int line, int col) {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      advance();
    return {Token::Kind::ident, std::string(src_.substr(start, pos_ - start)), line, col};
  }

  Token lex_number(int line, int col) {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
            src_[pos_] == '-' || src_[pos_] == '+' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      advance();
    return {Token::Kind::number, std::string(src_.substr(start, pos_ - start)), line, col};
  }

  Token lex_string(int line, int col) {
    advance();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= src_.size())
        throw GrammarSyntaxError(line, col, "unterminated string literal");
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return {Token::Kind::string, out, line, col};
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size())
          throw GrammarSyntaxError(line, col, "unterminated escape in string literal");
        char e = src_[pos_];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default:
            throw GrammarSyntaxError(line_, col_, std::string("unknown escape '\\") + e + "'");
        }
        advance();
      } else {
        if (c == '\n')
          throw GrammarSyntaxError(line, col, "newline inside string literal");
        out.push_back(c);
        advance();
      }
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct ParsedChoice {
  std::vector<Symbol> symbols;
  std::optional<double> prob;
  int line;
  int column;
};

struct ParsedRule {
  std::string lhs;
  std::vector<ParsedChoice> choices;
};

class TextParser {
 public:
  explicit TextParser(std::string_view src) : lexer_(src) { cur_ = lexer_.next(); }

  std::vector<ParsedRule> parse_file() {
    std::vector<ParsedRule> rules;
    while (cur_.kind != Token::Kind::eof) rules.push_back(parse_rule());
    return rules;
  }

 private:
  ParsedRule parse_rule() {
    Token name = expect(Token::Kind::ident, "rule name");
    expect(Token::Kind::colon, "':'");
    ParsedRule rule;
    rule.lhs = name.text;
    rule.choices.push_back(parse_choice());
    while (cur_.kind == Token::Kind::pipe) {
      bump();
      rule.choices.push_back(parse_choice());
    }
    expect(Token::Kind::semicolon, "';'");
    return rule;
  }

  ParsedChoice parse_choice() {
    ParsedChoice choice;
    choice.line = cur_.line;
    choice.column = cur_.column;
    if (cur_.kind == Token::Kind::langle) {
      bump();
      Token num = expect(Token::Kind::number, "probability value");
      char* end = nullptr;
      double p = std::strtod(num.text.c_str(), &end);
      if (end != num.text.c_str() + num.text.size() || !(p >= 0.0) || !(p <= 1.0))
        throw GrammarSyntaxError(num.line, num.column,
                                 "malformed probability annotation '" + num.text + "'");
      choice.prob = p;
      expect(Token::Kind::rangle, "'>'");
    }
    while (cur_.kind == Token::Kind::ident || cur_.kind == Token::Kind::string) {
      if (cur_.kind == Token::Kind::ident)
        choice.symbols.push_back(Symbol::nonterm(cur_.text));
      else
        choice.symbols.push_back(Symbol::term(cur_.text));
      bump();
    }
    if (choice.symbols.empty())
      throw GrammarSyntaxError(cur_.line, cur_.column,
                               "expected at least one symbol in choice");
    for (const Symbol& s : choice.symbols)
      if (s.is_terminal() && s.value.empty() && choice.symbols.size() != 1)
        throw GrammarSyntaxError(choice.line, choice.column,
                                 "empty terminal \"\" must be the sole symbol of its choice");
    return choice;
  }

  Token expect(Token::Kind kind, const std::string& what) {
    if (cur_.kind != kind)
      throw GrammarSyntaxError(cur_.line, cur_.column,
                               "expected " + what + ", got '" + describe(cur_) + "'");
    Token t = cur_;
    bump();
    return t;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::eof) return "end of input";
    if (t.kind == Token::Kind::string) return "\"" + t.text + "\"";
    return t.text;
  }

  void bump() { cur_ = lexer_.next(); }

  Lexer lexer_;
  Token cur_;
};

Grammar assemble(const std::vector<ParsedRule>& parsed) {
  if (parsed.empty()) throw GrammarError("grammar has no rules");
  std::vector<Rule> rules;
  std::set<std::string> defined;
  rules.reserve(parsed.size());
  for (const ParsedRule& pr : parsed) {
    if (!defined.insert(pr.lhs).second)
      throw GrammarError("duplicate rule for nonterminal '" + pr.lhs + "'");
    Rule r;
    r.lhs = pr.lhs;
    for (size_t c = 0; c < pr.choices.size(); ++c)
      r.choices.push_back({static_cast<int>(c), pr.choices[c].symbols});
    rules.push_back(std::move(r));
  }
  for (const ParsedRule& pr : parsed)
    for (const ParsedChoice& pc : pr.choices)
      for (const Symbol& s : pc.symbols)
        if (!s.is_terminal() && !defined.count(s.value))
          throw GrammarError("undefined nonterminal '" + s.value + "' referenced in rule '" +
                             pr.lhs + "'");
  return Grammar::build(parsed.front().lhs, std::move(rules));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  assert(ec == std::errc());
  return std::string(buf, ptr);
}

std::string quote_terminal(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

void write_choice_symbols(std::string& out, const Choice& c) {
  for (size_t i = 0; i < c.symbols.size(); ++i) {
    if (i) out.push_back(' ');
    const Symbol& s = c.symbols[i];
    out += s.is_terminal() ? quote_terminal(s.value) : s.value;
  }
}

}  // namespace

Grammar parse_grammar_text(std::string_view text) {
  return assemble(TextParser(text).parse_file());
}

ProbabilisticGrammar parse_probabilistic_grammar_text(std::string_view text) {
  std::vector<ParsedRule> parsed = TextParser(text).parse_file();
  Grammar g = assemble(parsed);
  std::vector<std::vector<double>> probs;
  probs.reserve(parsed.size());
  for (const ParsedRule& pr : parsed) {
    size_t annotated = 0;
    for (const ParsedChoice& pc : pr.choices)
      if (pc.prob) ++annotated;
    size_t n = pr.choices.size();
    if (annotated == 0) {
      probs.emplace_back(n, 1.0 / static_cast<double>(n));
      continue;
    }
    if (annotated != n)
      throw GrammarError("rule '" + pr.lhs +
                         "': either all choices or none must carry a probability");
    std::vector<double> p;
    double sum = 0.0;
    for (const ParsedChoice& pc : pr.choices) {
      p.push_back(*pc.prob);
      sum += *pc.prob;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw GrammarError("rule '" + pr.lhs + "': probabilities sum to " +
                         format_double(sum) + ", not 1");
    // Hand-written annotations may be off by a rounding slack; rescale those,
    // but keep machine-written values untouched so files round-trip exactly.
    if (std::abs(sum - 1.0) > ProbabilisticGrammar::kSimplexTolerance)
      for (double& v : p) v /= sum;
    probs.push_back(std::move(p));
  }
  return ProbabilisticGrammar(std::move(g), std::move(probs));
}

std::string write_probabilistic_grammar_text(const ProbabilisticGrammar& pg) {
  std::string out;
  const Grammar& g = pg.grammar();
  for (size_t i = 0; i < g.rule_count(); ++i) {
    const Rule& r = g.rule_at(i);
    out += r.lhs;
    out += " :";
    for (size_t c = 0; c < r.choices.size(); ++c) {
      out += c ? " | " : " ";
      out += "<" + format_double(pg.prob(i, c)) + "> ";
      write_choice_symbols(out, r.choices[c]);
    }
    out += " ;\n";
  }
  return out;
}

std::string write_grammar_text(const Grammar& g) {
  std::string out;
  for (const Rule& r : g.rules()) {
    out += r.lhs;
    out += " :";
    for (size_t c = 0; c < r.choices.size(); ++c) {
      out += c ? " | " : " ";
      write_choice_symbols(out, r.choices[c]);
    }
    out += " ;\n";
  }
  return out;
}

}  // namespace gfuzz
