#include <string_view>

#include "gfuzz/target.hpp"

namespace gfuzz {

namespace {

// Branch identifiers of the instrumented toy JSON parser. Kept explicit so
// coverage sets are stable across builds.
enum Branch : int {
  B_VALUE_OBJECT = 0,
  B_VALUE_ARRAY,
  B_VALUE_STRING,
  B_VALUE_NUMBER,
  B_VALUE_TRUE,
  B_VALUE_FALSE,
  B_VALUE_NULL,
  B_VALUE_BAD,
  B_OBJECT_EMPTY,
  B_OBJECT_MEMBERS,
  B_OBJECT_MORE,
  B_OBJECT_END,
  B_OBJECT_BAD_KEY,
  B_OBJECT_BAD_COLON,
  B_OBJECT_BAD_END,
  B_ARRAY_EMPTY,
  B_ARRAY_ELEMENTS,
  B_ARRAY_MORE,
  B_ARRAY_END,
  B_ARRAY_BAD_END,
  B_STRING_PLAIN,
  B_STRING_ESCAPE,
  B_STRING_BAD_ESCAPE,
  B_STRING_UNTERMINATED,
  B_NUMBER_NEGATIVE,
  B_NUMBER_INT,
  B_NUMBER_FRAC,
  B_NUMBER_EXP,
  B_NUMBER_EXP_SIGN,
  B_NUMBER_BAD,
  B_NUMBER_TOO_LONG,
  B_DEPTH_SHALLOW,
  B_DEPTH_MID,
  B_DEPTH_DEEP,
  B_DEPTH_OVERFLOW,
  B_LITERAL_BAD,
  B_WS_SKIPPED,
  B_TOP_OK,
  B_TOP_TRAILING,
  B_TOP_EMPTY,
  kBranchTotal
};

constexpr int kMaxNestingDepth = 20;
constexpr int kMaxNumberDigits = 12;

struct Failure {
  const char* type;
};

class ToyJsonParser {
 public:
  ToyJsonParser(std::string_view input, std::set<int>& cov) : in_(input), cov_(cov) {}

  void run() {
    skip_ws();
    if (pos_ >= in_.size()) {
      hit(B_TOP_EMPTY);
      throw Failure{"SyntaxError"};
    }
    parse_value();
    skip_ws();
    if (pos_ != in_.size()) {
      hit(B_TOP_TRAILING);
      throw Failure{"SyntaxError"};
    }
    hit(B_TOP_OK);
  }

 private:
  void hit(int branch) { cov_.insert(branch); }

  char peek() const { return pos_ < in_.size() ? in_[pos_] : '\0'; }

  void skip_ws() {
    bool any = false;
    while (pos_ < in_.size() &&
           (in_[pos_] == ' ' || in_[pos_] == '\t' || in_[pos_] == '\n' || in_[pos_] == '\r')) {
      ++pos_;
      any = true;
    }
    if (any) hit(B_WS_SKIPPED);
  }

  void enter() {
    ++depth_;
    if (depth_ > kMaxNestingDepth) {
      hit(B_DEPTH_OVERFLOW);
      throw Failure{"DepthError"};
    }
    if (depth_ <= 4)
      hit(B_DEPTH_SHALLOW);
    else if (depth_ <= 12)
      hit(B_DEPTH_MID);
    else
      hit(B_DEPTH_DEEP);
  }

  void leave() { --depth_; }

  void parse_value() {
    skip_ws();
    char c = peek();
    if (c == '{') {
      hit(B_VALUE_OBJECT);
      parse_object();
    } else if (c == '[') {
      hit(B_VALUE_ARRAY);
      parse_array();
    } else if (c == '"') {
      hit(B_VALUE_STRING);
      parse_string();
    } else if (c == '-' || (c >= '0' && c <= '9')) {
      hit(B_VALUE_NUMBER);
      parse_number();
    } else if (match_literal("true")) {
      hit(B_VALUE_TRUE);
    } else if (match_literal("false")) {
      hit(B_VALUE_FALSE);
    } else if (match_literal("null")) {
      hit(B_VALUE_NULL);
    } else {
      hit(B_VALUE_BAD);
      throw Failure{"SyntaxError"};
    }
  }

  bool match_literal(std::string_view lit) {
    if (in_.compare(pos_, lit.size(), lit) != 0) {
      if (pos_ < in_.size() && (in_[pos_] == 't' || in_[pos_] == 'f' || in_[pos_] == 'n'))
        hit(B_LITERAL_BAD);
      return false;
    }
    pos_ += lit.size();
    return true;
  }

  void parse_object() {
    enter();
    ++pos_;  // '{'
    skip_ws();
    if (peek() == '}') {
      hit(B_OBJECT_EMPTY);
      ++pos_;
      leave();
      return;
    }
    hit(B_OBJECT_MEMBERS);
    while (true) {
      skip_ws();
      if (peek() != '"') {
        hit(B_OBJECT_BAD_KEY);
        throw Failure{"SyntaxError"};
      }
      parse_string();
      skip_ws();
      if (peek() != ':') {
        hit(B_OBJECT_BAD_COLON);
        throw Failure{"SyntaxError"};
      }
      ++pos_;
      parse_value();
      skip_ws();
      if (peek() == ',') {
        hit(B_OBJECT_MORE);
        ++pos_;
        continue;
      }
      if (peek() == '}') {
        hit(B_OBJECT_END);
        ++pos_;
        leave();
        return;
      }
      hit(B_OBJECT_BAD_END);
      throw Failure{"SyntaxError"};
    }
  }

  void parse_array() {
    enter();
    ++pos_;  // '['
    skip_ws();
    if (peek() == ']') {
      hit(B_ARRAY_EMPTY);
      ++pos_;
      leave();
      return;
    }
    hit(B_ARRAY_ELEMENTS);
    while (true) {
      parse_value();
      skip_ws();
      if (peek() == ',') {
        hit(B_ARRAY_MORE);
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        hit(B_ARRAY_END);
        ++pos_;
        leave();
        return;
      }
      hit(B_ARRAY_BAD_END);
      throw Failure{"SyntaxError"};
    }
  }

  void parse_string() {
    ++pos_;  // opening quote
    while (true) {
      if (pos_ >= in_.size()) {
        hit(B_STRING_UNTERMINATED);
        throw Failure{"SyntaxError"};
      }
      char c = in_[pos_];
      if (c == '"') {
        ++pos_;
        return;
      }
      if (c == '\\') {
        ++pos_;
        char e = peek();
        if (e == '"' || e == '\\' || e == 'n' || e == 't' || e == 'r') {
          hit(B_STRING_ESCAPE);
          ++pos_;
        } else {
          hit(B_STRING_BAD_ESCAPE);
          throw Failure{"SyntaxError"};
        }
      } else {
        hit(B_STRING_PLAIN);
        ++pos_;
      }
    }
  }

  void parse_number() {
    int digits = 0;
    if (peek() == '-') {
      hit(B_NUMBER_NEGATIVE);
      ++pos_;
    }
    if (!(peek() >= '0' && peek() <= '9')) {
      hit(B_NUMBER_BAD);
      throw Failure{"SyntaxError"};
    }
    hit(B_NUMBER_INT);
    while (peek() >= '0' && peek() <= '9') {
      ++digits;
      ++pos_;
    }
    if (peek() == '.') {
      ++pos_;
      if (!(peek() >= '0' && peek() <= '9')) {
        hit(B_NUMBER_BAD);
        throw Failure{"SyntaxError"};
      }
      hit(B_NUMBER_FRAC);
      while (peek() >= '0' && peek() <= '9') {
        ++digits;
        ++pos_;
      }
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '-' || peek() == '+') {
        hit(B_NUMBER_EXP_SIGN);
        ++pos_;
      }
      if (!(peek() >= '0' && peek() <= '9')) {
        hit(B_NUMBER_BAD);
        throw Failure{"SyntaxError"};
      }
      hit(B_NUMBER_EXP);
      while (peek() >= '0' && peek() <= '9') {
        ++digits;
        ++pos_;
      }
    }
    if (digits > kMaxNumberDigits) {
      hit(B_NUMBER_TOO_LONG);
      throw Failure{"NumberFormatError"};
    }
  }

  std::string_view in_;
  std::set<int>& cov_;
  size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

ExecutionResult builtin_json_target(std::string_view input) {
  ExecutionResult result;
  std::set<int> cov;
  try {
    ToyJsonParser(input, cov).run();
    result.outcome = ExecutionResult::Outcome::ok;
  } catch (const Failure& f) {
    result.outcome = ExecutionResult::Outcome::exception;
    result.exception_type = f.type;
  }
  result.coverage = std::move(cov);
  return result;
}

int builtin_json_branch_total() { return kBranchTotal; }

ExecutionResult builtin_ok_target(std::string_view) {
  return ExecutionResult{};
}

}  // namespace gfuzz
