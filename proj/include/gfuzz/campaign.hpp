#ifndef GFUZZ_CAMPAIGN_HPP
#define GFUZZ_CAMPAIGN_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gfuzz/generator.hpp"
#include "gfuzz/grammar.hpp"
#include "gfuzz/learner.hpp"
#include "gfuzz/rng.hpp"
#include "gfuzz/target.hpp"

namespace gfuzz {

struct CampaignConfig {
  enum class Mode { evolutionary, baseline };

  size_t population_size = 100;
  double elitism_rate = 0.05;
  int tournament_count = 10;
  int tournament_size = 10;
  int mutation_count = 1;
  double lambda = 2.0;
  int depth_limit = 64;
  uint64_t max_expansions = 50000;
  double time_budget_secs = 600.0;
  uint64_t rng_seed = 0;
  int max_generations = 0;  // 0 = no generation cap, budget only
  int eval_workers = 1;
  Mode mode = Mode::evolutionary;
  // Keep archived input bytes in the returned report. Streaming consumers
  // (the CLI writes them to disk from the hook) turn this off so long runs
  // with many distinct triggering inputs stay within memory.
  bool store_archive_inputs = true;
};

// Time source of a campaign. The real clock measures wall time; the virtual
// clock advances one millisecond per target execution, which makes budgeted
// runs (and their reports) fully deterministic.
class CampaignClock {
 public:
  virtual ~CampaignClock() = default;
  virtual int64_t elapsed_ms() const = 0;
  virtual void on_execution() {}
};

class RealClock : public CampaignClock {
 public:
  RealClock() : start_(std::chrono::steady_clock::now()) {}
  int64_t elapsed_ms() const override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

class VirtualClock : public CampaignClock {
 public:
  int64_t elapsed_ms() const override { return ticks_; }
  void on_execution() override { ++ticks_; }

 private:
  int64_t ticks_ = 0;
};

struct GenerationRecord {
  int gen;
  double best_structure;
  double median_structure;
  int exceptional;  // individuals with a triggering outcome this generation
  int64_t elapsed_ms;
};

struct ExceptionEvent {
  int gen;
  std::string type;
  std::string input;
  int64_t elapsed_ms;
};

struct CampaignSummary {
  int generations = 0;
  uint64_t inputs_generated = 0;
  uint64_t inputs_executed = 0;
  int unique_exception_types = 0;
};

struct CampaignReport {
  std::vector<GenerationRecord> generations;
  std::vector<ExceptionEvent> archive;  // first sighting of each (type, input)
  CampaignSummary summary;
  std::set<int> coverage;         // union over all executions (built-in targets)
  std::set<std::string> exception_types;
};

// Streaming observers. on_generation/on_exception fire as records are
// produced (the CLI appends report lines through them); on_grammar exposes
// the freshly learned and the mutated grammar of each iteration.
struct CampaignHooks {
  std::function<void(const GenerationRecord&)> on_generation;
  std::function<void(const ExceptionEvent&)> on_exception;
  std::function<void(int gen, const ProbabilisticGrammar& learned,
                     const ProbabilisticGrammar& mutated)>
      on_grammar;
};

// Elites plus tournament winners, as indices into the population (duplicates
// retained). The top ceil(e_rate * |P|) by fitness are elites (stable order
// on ties); each of the tournament_count tournaments draws tournament_size
// distinct participants from the non-elite remainder and keeps its best. A
// remainder smaller than the tournament size is used whole.
std::vector<size_t> select(const Population& pop, const CampaignConfig& cfg, Rng& rng);

// Redraws the choice distribution of mutation_count randomly picked rules
// (among rules with at least two choices): every choice gets r_i uniform on
// (0,1], normalized by the sum. The input grammar is left untouched; with no
// eligible rule the copy is returned unchanged.
ProbabilisticGrammar mutate_grammar(const ProbabilisticGrammar& pg, int mutation_count,
                                    Rng& rng);

// Full evolutionary loop: learn choice probabilities from the seeds, then
// generate / evaluate / select / re-learn / mutate until the budget or the
// generation cap is reached. Every exception-triggering input is archived,
// deduplicated by (type, input bytes).
CampaignReport run_campaign(const CampaignConfig& cfg, const Grammar& grammar,
                            const std::vector<std::string>& seeds, const TargetSpec& target,
                            CampaignClock& clock, const CampaignHooks& hooks = {});

// Comparison mode: learns from the seeds once, then keeps generating and
// executing fresh populations from that fixed grammar. No selection,
// learning, or mutation.
CampaignReport run_baseline(const CampaignConfig& cfg, const Grammar& grammar,
                            const std::vector<std::string>& seeds, const TargetSpec& target,
                            CampaignClock& clock, const CampaignHooks& hooks = {});

inline Fitness evaluate_fitness(const Individual& ind, const ExecutionResult& result,
                                const FitnessConfig& cfg) {
  return Fitness{score_feedback(result), score_structure(ind.expansions, ind.length, cfg)};
}

}  // namespace gfuzz

#endif
