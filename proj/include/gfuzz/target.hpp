#ifndef GFUZZ_TARGET_HPP
#define GFUZZ_TARGET_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gfuzz {

struct ExecutionResult {
  enum class Outcome { ok, exception, timeout };
  Outcome outcome = Outcome::ok;
  std::string exception_type;  // non-empty iff outcome == exception
  int64_t duration_ms = 0;
  // Branch identifiers reached; only built-in targets report coverage.
  std::optional<std::set<int>> coverage;

  bool is_exceptional() const { return outcome != Outcome::ok; }
};

// Feedback component of the fitness: exceptions and timeouts both count as
// a triggered failure.
inline bool score_feedback(const ExecutionResult& r) { return r.is_exceptional(); }

// Maps diagnostic output of an external target to an exception type. The
// first matching pattern wins; type_group selects the capture group holding
// the type name.
struct ClassifierEntry {
  std::string pattern;
  int type_group = 1;
};

struct TargetSpec {
  enum class Kind { builtin, external };
  Kind kind = Kind::builtin;
  std::string builtin_name = "json";  // "json" | "ok"
  // Whitespace-separated argv template; "{}" is replaced with the path of a
  // temporary file holding the input. Run directly (no shell).
  std::string command_template;
  int timeout_ms = 3000;
  std::vector<ClassifierEntry> classifiers;
  bool nonzero_exit_is_exception = true;
  size_t max_capture_bytes = 64 * 1024;

  static TargetSpec builtin(std::string name) {
    TargetSpec t;
    t.kind = Kind::builtin;
    t.builtin_name = std::move(name);
    return t;
  }
  static TargetSpec external(std::string command_template, int timeout_ms = 3000) {
    TargetSpec t;
    t.kind = Kind::external;
    t.command_template = std::move(command_template);
    t.timeout_ms = timeout_ms;
    return t;
  }
};

// Raised for harness-side faults (unknown built-in, spawn failure, bad
// classifier config). Target failures are never exceptions; they are data
// in the ExecutionResult.
struct TargetError : std::runtime_error {
  explicit TargetError(const std::string& msg) : std::runtime_error(msg) {}
};

ExecutionResult execute(const TargetSpec& target, std::string_view input);

// Recursive-descent parser for a small JSON-like language, instrumented with
// branch counters and carrying two seeded defects: "DepthError" past nesting
// depth 20 and "NumberFormatError" for numeric literals with more than 12
// digits. Invalid input yields "SyntaxError". Deterministic and pure.
ExecutionResult builtin_json_target(std::string_view input);
int builtin_json_branch_total();

// Built-in target that accepts everything and reports nothing; useful as a
// feedback-free baseline target.
ExecutionResult builtin_ok_target(std::string_view input);

// Does the named built-in target exist?
bool builtin_target_exists(std::string_view name);
// Total instrumented branches of a built-in target (0 if uninstrumented).
int builtin_target_branch_total(std::string_view name);

struct CoverageSummary {
  std::set<int> covered;
  int total = 0;
  double percent = 0.0;
};

CoverageSummary coverage_union(std::span<const ExecutionResult> results, int total);
CoverageSummary coverage_union_sets(const std::set<int>& covered, int total);

}  // namespace gfuzz

#endif
