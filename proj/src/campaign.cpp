#include "gfuzz/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <iostream>
#include <thread>

namespace gfuzz {

namespace {

// Stream tags for campaign phases, outside the per-individual index range.
constexpr uint64_t kSelectStream = ~uint64_t{0};
constexpr uint64_t kMutateStream = ~uint64_t{1};

size_t elite_count(const CampaignConfig& cfg, size_t pop_size) {
  return static_cast<size_t>(
      std::ceil(cfg.elitism_rate * static_cast<double>(pop_size)));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

struct CampaignState {
  CampaignReport report;
  // Dedup keys for (type, input bytes); inputs are hashed so the set stays
  // small over long campaigns with many distinct triggering inputs.
  std::set<std::pair<std::string, uint64_t>> archived;
};

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Runs the target over the population (optionally on several workers),
// assigns fitness, and folds the results into the report. Results are
// committed in index order, so worker count never changes the outcome.
std::vector<ExecutionResult> evaluate_generation(Population& pop, const TargetSpec& target,
                                                 const CampaignConfig& cfg,
                                                 CampaignClock& clock, CampaignState& state,
                                                 const CampaignHooks& hooks) {
  const size_t n = pop.size();
  std::vector<ExecutionResult> results(n);
  const int workers = std::max(1, cfg.eval_workers);
  if (workers == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) results[i] = execute(target, pop.individuals[i].text);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          results[i] = execute(target, pop.individuals[i].text);
      });
    for (auto& t : pool) t.join();
  }

  FitnessConfig fitness_cfg{cfg.lambda};
  int exceptional = 0;
  std::vector<double> structures;
  structures.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    clock.on_execution();
    Individual& ind = pop.individuals[i];
    const ExecutionResult& res = results[i];
    ind.fitness = evaluate_fitness(ind, res, fitness_cfg);
    structures.push_back(ind.fitness->structure);
    if (res.is_exceptional()) ++exceptional;
    if (res.coverage)
      state.report.coverage.insert(res.coverage->begin(), res.coverage->end());
    if (res.is_exceptional()) {
      std::string type = res.outcome == ExecutionResult::Outcome::timeout
                             ? "timeout"
                             : res.exception_type;
      state.report.exception_types.insert(type);
      if (state.archived.emplace(type, ind.text).second) {
        ExceptionEvent event{pop.generation, type, ind.text, clock.elapsed_ms()};
        state.report.archive.push_back(event);
        if (hooks.on_exception) hooks.on_exception(event);
      }
    }
  }

  state.report.summary.inputs_generated += n;
  state.report.summary.inputs_executed += n;
  double best = structures.empty() ? 0.0 : *std::max_element(structures.begin(), structures.end());
  GenerationRecord rec{pop.generation, best, median(std::move(structures)), exceptional,
                       clock.elapsed_ms()};
  state.report.generations.push_back(rec);
  state.report.summary.generations += 1;
  if (hooks.on_generation) hooks.on_generation(rec);
  return results;
}

bool budget_left(const CampaignConfig& cfg, const CampaignClock& clock, int next_gen) {
  if (cfg.max_generations > 0 && next_gen >= cfg.max_generations) return false;
  return static_cast<double>(clock.elapsed_ms()) < cfg.time_budget_secs * 1000.0;
}

void finish(CampaignState& state) {
  state.report.summary.unique_exception_types =
      static_cast<int>(state.report.exception_types.size());
}

}  // namespace

std::vector<size_t> select(const Population& pop, const CampaignConfig& cfg, Rng& rng) {
  const size_t n = pop.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& fa = pop.individuals[a].fitness;
    const auto& fb = pop.individuals[b].fitness;
    if (!fa || !fb) throw GrammarError("select requires fitness on every individual");
    return *fa > *fb;
  });

  const size_t elites = std::min(elite_count(cfg, n), n);
  std::vector<size_t> selected(order.begin(), order.begin() + static_cast<long>(elites));

  std::vector<size_t> remainder(order.begin() + static_cast<long>(elites), order.end());
  if (remainder.empty()) return selected;

  for (int t = 0; t < cfg.tournament_count; ++t) {
    const size_t draw = std::min<size_t>(static_cast<size_t>(cfg.tournament_size),
                                         remainder.size());
    // Partial Fisher-Yates over a scratch copy: distinct participants within
    // one tournament, independent draws across tournaments.
    std::vector<size_t> pool = remainder;
    size_t winner = n;  // sentinel
    for (size_t d = 0; d < draw; ++d) {
      size_t pick = d + rng.next_index(pool.size() - d);
      std::swap(pool[d], pool[pick]);
      size_t candidate = pool[d];
      if (winner == n ||
          *pop.individuals[candidate].fitness > *pop.individuals[winner].fitness ||
          (*pop.individuals[candidate].fitness == *pop.individuals[winner].fitness &&
           candidate < winner))
        winner = candidate;
    }
    selected.push_back(winner);
  }
  return selected;
}

ProbabilisticGrammar mutate_grammar(const ProbabilisticGrammar& pg, int mutation_count,
                                    Rng& rng) {
  const Grammar& g = pg.grammar();
  std::vector<size_t> eligible;
  for (size_t i = 0; i < g.rule_count(); ++i)
    if (g.rule_at(i).choices.size() >= 2) eligible.push_back(i);

  std::vector<std::vector<double>> probs = pg.probs();
  if (eligible.empty()) {
    static std::atomic<bool> warned{false};
    if (mutation_count > 0 && !warned.exchange(true))
      std::cerr << "gfuzz: grammar has no rule with >= 2 choices; mutation is a no-op\n";
    return ProbabilisticGrammar(g, std::move(probs));
  }
  for (int m = 0; m < mutation_count; ++m) {
    size_t rule = eligible[rng.next_index(eligible.size())];
    std::vector<double>& p = probs[rule];
    double sum = 0.0;
    for (double& v : p) {
      v = rng.next_open_closed();
      sum += v;
    }
    for (double& v : p) v /= sum;
  }
  return ProbabilisticGrammar(g, std::move(probs));
}

namespace {

void check_config(const CampaignConfig& cfg) {
  if (cfg.population_size < 1) throw GrammarError("population size must be at least 1");
  if (!(cfg.elitism_rate >= 0.0 && cfg.elitism_rate <= 1.0))
    throw GrammarError("elitism rate must be within [0,1]");
  if (cfg.tournament_size < 1) throw GrammarError("tournament size must be at least 1");
  if (cfg.tournament_count < 0) throw GrammarError("tournament count must be non-negative");
  if (cfg.mutation_count < 0) throw GrammarError("mutation count must be non-negative");
  if (!(cfg.lambda > 0.0)) throw GrammarError("lambda must be positive");
}

CampaignReport run_loop(const CampaignConfig& cfg, const Grammar& grammar,
                        const std::vector<std::string>& seeds, const TargetSpec& target,
                        CampaignClock& clock, const CampaignHooks& hooks, bool evolve) {
  check_config(cfg);
  CorpusLearnResult learned = learn_from_corpus(grammar, seeds);
  for (size_t i = 0; i < learned.statuses.size(); ++i)
    if (!learned.statuses[i].ok)
      std::cerr << "gfuzz: seed " << i << " skipped: " << learned.statuses[i].error << "\n";
  ProbabilisticGrammar pg = learned.pg;

  CampaignState state;
  GeneratorLimits limits{cfg.depth_limit, cfg.max_expansions};

  for (int gen = 0; budget_left(cfg, clock, gen); ++gen) {
    Population pop = generate_population(pg, cfg.population_size, limits, cfg.rng_seed, gen);
    evaluate_generation(pop, target, cfg, clock, state, hooks);
    if (!evolve) continue;

    Rng select_rng(substream_seed(cfg.rng_seed, static_cast<uint64_t>(gen), kSelectStream));
    std::vector<size_t> chosen = select(pop, cfg, select_rng);

    ChoiceCounts counts(grammar);
    for (size_t idx : chosen) counts.merge(pop.individuals[idx].counts);
    ProbabilisticGrammar relearned = learn_probabilities(grammar, counts);

    Rng mutate_rng(substream_seed(cfg.rng_seed, static_cast<uint64_t>(gen), kMutateStream));
    ProbabilisticGrammar mutated = mutate_grammar(relearned, cfg.mutation_count, mutate_rng);
    if (hooks.on_grammar) hooks.on_grammar(gen, relearned, mutated);
    pg = std::move(mutated);
  }

  finish(state);
  return std::move(state.report);
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& cfg, const Grammar& grammar,
                            const std::vector<std::string>& seeds, const TargetSpec& target,
                            CampaignClock& clock, const CampaignHooks& hooks) {
  return run_loop(cfg, grammar, seeds, target, clock, hooks, /*evolve=*/true);
}

CampaignReport run_baseline(const CampaignConfig& cfg, const Grammar& grammar,
                            const std::vector<std::string>& seeds, const TargetSpec& target,
                            CampaignClock& clock, const CampaignHooks& hooks) {
  return run_loop(cfg, grammar, seeds, target, clock, hooks, /*evolve=*/false);
}

}  // namespace gfuzz
