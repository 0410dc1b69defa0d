// Acceptance suite. Runs every criterion and prints one line each:
//
//   [PASS] criterion 1: ...
//   [FAIL] criterion 7: ... (detail)
//
// The default (full) configuration drives a 30-repeat 60-second benchmark
// campaign and takes about an hour on one core. --smoke shrinks the long
// criteria (the coverage comparison then checks ordering only, per its
// documented reduced variant).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfuzz/campaign.hpp"
#include "gfuzz/earley.hpp"
#include "gfuzz/grammar_text.hpp"
#include "gfuzz/stats.hpp"

namespace fs = std::filesystem;
using namespace gfuzz;

namespace {

struct Options {
  std::string cli;
  std::string data;  // repo root: grammars/, seeds/
  bool smoke = false;
  int only = 0;  // run a single criterion
};

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail = "") {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_seed_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> seeds;
  for (const auto& f : files) seeds.push_back(read_file(f));
  return seeds;
}

Grammar load_grammar(const Options& opt, const std::string& name) {
  return parse_grammar_text(read_file(fs::path(opt.data) / "grammars" / name));
}

int run_cli(const Options& opt, const std::string& args) {
  std::string cmd = opt.cli + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

// Random productive grammars, as in the unit helpers but self-contained.
Grammar random_toy_grammar(Rng& rng) {
  size_t n_rules = 1 + rng.next_index(5);
  std::vector<std::string> names;
  for (size_t i = 0; i < n_rules; ++i) names.push_back("n" + std::to_string(i));
  const char* terminals[] = {"a", "b", "x", "[", "]", ","};
  std::vector<Rule> rules;
  for (size_t i = 0; i < n_rules; ++i) {
    Rule r;
    r.lhs = names[i];
    size_t n_choices = 1 + rng.next_index(4);
    for (size_t c = 0; c < n_choices; ++c) {
      Choice ch;
      if (c == 0) {
        ch.symbols.push_back(Symbol::term(terminals[rng.next_index(6)]));
      } else {
        size_t n_syms = 1 + rng.next_index(3);
        for (size_t s = 0; s < n_syms; ++s) {
          if (rng.next_double() < 0.5)
            ch.symbols.push_back(Symbol::term(terminals[rng.next_index(6)]));
          else
            ch.symbols.push_back(Symbol::nonterm(names[rng.next_index(n_rules)]));
        }
      }
      bool dup = false;
      for (const Choice& prev : r.choices)
        if (prev.symbols == ch.symbols) dup = true;
      if (dup) continue;
      ch.index = static_cast<int>(r.choices.size());
      r.choices.push_back(std::move(ch));
    }
    rules.push_back(std::move(r));
  }
  return Grammar::build(names[0], std::move(rules));
}

// --- criterion 1: simplex invariant over randomized learn/mutate ----------
void criterion_simplex(const Options&) {
  Rng rng(101);
  size_t ops = 0;
  bool ok = true;
  std::string detail;
  auto check_simplex = [](const ProbabilisticGrammar& p, bool positives_required,
                          const std::vector<std::vector<double>>* before) {
    for (size_t r = 0; r < p.grammar().rule_count(); ++r) {
      double sum = 0.0;
      bool changed = false;
      for (size_t c = 0; c < p.rule_probs(r).size(); ++c) {
        double v = p.prob(r, c);
        if (!(v >= 0.0 && v <= 1.0)) return false;
        sum += v;
        if (before && v != (*before)[r][c]) changed = true;
      }
      if (std::abs(sum - 1.0) > 1e-9) return false;
      if (positives_required && changed)
        for (double v : p.rule_probs(r))
          if (!(v > 0.0)) return false;
    }
    return true;
  };
  while (ops < 10000 && ok) {
    Grammar g = random_toy_grammar(rng);
    ChoiceCounts counts(g);
    for (size_t r = 0; r < g.rule_count(); ++r)
      for (size_t c = 0; c < g.rule_at(r).choices.size(); ++c)
        counts.add(r, c, rng.next_index(20));
    ProbabilisticGrammar pg = learn_probabilities(g, counts);
    ++ops;
    if (!check_simplex(pg, false, nullptr)) {
      ok = false;
      detail = "learn broke the simplex";
      break;
    }
    for (int m = 0; m < 5 && ops < 10000; ++m) {
      std::vector<std::vector<double>> before = pg.probs();
      pg = mutate_grammar(pg, 1, rng);
      ++ops;
      if (!check_simplex(pg, true, &before)) {
        ok = false;
        detail = "mutate broke the simplex or produced a non-positive entry";
        break;
      }
    }
  }
  report(1, ok, "simplex invariant over " + std::to_string(ops) + " learn/mutate operations",
         detail);
}

// --- criterion 2: round-trip + choice frequency ----------------------------
void criterion_roundtrip(const Options& opt) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"list.g", "json.g", "expr.g"}) {
    Grammar g = load_grammar(opt, name);
    ProbabilisticGrammar pg = uniform_probabilities(g);
    EarleyParser parser(g);
    Population pop = generate_population(pg, 1000, GeneratorLimits{16, 20000}, 2024, 0);
    for (const Individual& ind : pop.individuals) {
      try {
        if (parser.parse(ind.text).yield() != ind.text) {
          ok = false;
          detail = std::string(name) + ": yield mismatch";
          break;
        }
      } catch (const ParseError& e) {
        ok = false;
        detail = std::string(name) + ": generated input failed to re-parse: " + e.what();
        break;
      }
    }
    if (!ok) break;
  }

  if (ok) {
    Grammar two = parse_grammar_text("start : \"a\" | \"b\" ;");
    ProbabilisticGrammar pg(two, {{0.7, 0.3}});
    Generator gen(pg, GeneratorLimits{});
    size_t a_count = 0;
    for (size_t k = 0; k < 10000; ++k) {
      Rng rng(substream_seed(77, 0, k));
      if (gen.generate(rng).text == "a") ++a_count;
    }
    double freq = static_cast<double>(a_count) / 10000.0;
    if (std::abs(freq - 0.7) > 0.02) {
      ok = false;
      detail = "frequency " + std::to_string(freq) + " outside 0.7 +- 0.02";
    }
  }
  report(2, ok, "1000-input round-trip per grammar; 2-choice frequencies within +-0.02",
         detail);
}

// --- criterion 3: learning recovery ----------------------------------------
void criterion_recovery(const Options& opt) {
  Grammar g = load_grammar(opt, "list.g");
  ProbabilisticGrammar source(g, {{1.0}, {0.4, 0.6}, {0.7, 0.3}, {0.5, 0.5}});
  Generator gen(source, GeneratorLimits{});
  std::vector<std::string> texts;
  texts.reserve(10000);
  for (size_t k = 0; k < 10000; ++k) {
    Rng rng(substream_seed(555, 0, k));
    texts.push_back(gen.generate(rng).text);
  }
  CorpusLearnResult learned = learn_from_corpus(g, texts);
  bool ok = learned.failed == 0;
  std::string detail = ok ? "" : "some samples failed to re-parse";
  double worst = 0.0;
  for (size_t r = 0; r < g.rule_count() && ok; ++r)
    for (size_t c = 0; c < g.rule_at(r).choices.size(); ++c) {
      double err = std::abs(learned.pg.prob(r, c) - source.prob(r, c));
      worst = std::max(worst, err);
      if (err > 0.02) {
        ok = false;
        detail = g.rule_at(r).lhs + " choice " + std::to_string(c) + " off by " +
                 std::to_string(err);
      }
    }
  report(3, ok,
         "10000-sample learning recovery within +-0.02 (worst " + std::to_string(worst) + ")",
         detail);
}

// --- criterion 4: fitness oracle -------------------------------------------
void criterion_fitness(const Options&) {
  bool ok = true;
  std::string detail;
  if (score_structure(30, 10, {2.0}) != 45.0) {
    ok = false;
    detail = "structure score: expected exactly 45.0";
  }
  if (expansion_ratio(30, 10, {2.0}) != 1.5 || expansion_ratio(15, 10, {1.5}) != 1.0 ||
      expansion_ratio(3, 0, {1.5}) != 2.0) {
    ok = false;
    detail = "ratio arithmetic mismatch";
  }
  Rng rng(404);
  auto random_fitness = [&] {
    return Fitness{rng.next_double() < 0.5, rng.next_double() * 100.0};
  };
  for (int i = 0; i < 10000 && ok; ++i) {
    Fitness a = random_fitness(), b = random_fitness(), c = random_fitness();
    bool total = (a < b) || (b < a) || (a == b);
    bool antisym = !((a < b) && (b < a));
    bool trans = !((a < b) && (b < c)) || (a < c);
    bool dominance = !(a.exceptional && !b.exceptional) || (a > b);
    if (!(total && antisym && trans && dominance)) {
      ok = false;
      detail = "ordering law violated on triple " + std::to_string(i);
    }
  }
  report(4, ok, "fitness arithmetic matches worked examples; ordering laws on 10000 triples",
         detail);
}

// --- criterion 5: Mann-Whitney oracle ---------------------------------------
double enumeration_p(const std::vector<double>& a, const std::vector<double>& b) {
  const int n1 = static_cast<int>(a.size());
  const int total = n1 + static_cast<int>(b.size());
  std::vector<double> sorted(a);
  sorted.insert(sorted.end(), b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end());
  double rank_sum_a = 0;
  for (double v : a)
    rank_sum_a += static_cast<double>(
        std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin() + 1);
  const double u_obs = rank_sum_a - n1 * (n1 + 1) / 2.0;

  std::vector<int> idx(static_cast<size_t>(n1));
  for (int i = 0; i < n1; ++i) idx[static_cast<size_t>(i)] = i;
  double le = 0, ge = 0, all = 0;
  while (true) {
    double rs = 0;
    for (int i : idx) rs += i + 1;
    double u = rs - n1 * (n1 + 1) / 2.0;
    all += 1;
    if (u <= u_obs) le += 1;
    if (u >= u_obs) ge += 1;
    int i = n1 - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == total - n1 + i) --i;
    if (i < 0) break;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < n1; ++j)
      idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / all);
}

void criterion_mann_whitney(const Options&) {
  Rng rng(1905);
  bool ok = true;
  std::string detail;
  for (int n1 = 1; n1 <= 9 && ok; ++n1) {
    for (int n2 = 1; n1 + n2 <= 10 && ok; ++n2) {
      for (int rep = 0; rep < 200 && ok; ++rep) {
        std::vector<double> pool;
        for (int i = 0; i < n1 + n2; ++i)
          pool.push_back(static_cast<double>(i) + rng.next_double() * 0.5);
        for (size_t i = pool.size(); i > 1; --i)
          std::swap(pool[i - 1], pool[rng.next_index(i)]);
        std::vector<double> a(pool.begin(), pool.begin() + n1);
        std::vector<double> b(pool.begin() + n1, pool.end());
        double expect = enumeration_p(a, b);
        auto got = mann_whitney_u(a, b);
        if (got.p_two_sided != expect) {
          ok = false;
          detail = "exact p mismatch at sizes " + std::to_string(n1) + "/" +
                   std::to_string(n2);
        }
      }
    }
  }
  for (int rep = 0; rep < 200 && ok; ++rep) {
    std::vector<double> a, b;
    for (int i = 0; i < 8; ++i) {
      a.push_back(rng.next_double());
      b.push_back(rng.next_double());
    }
    auto exact = mann_whitney_u(a, b);
    double mean = 32.0, sd = std::sqrt(8.0 * 8.0 * 17.0 / 12.0);
    double z = std::max(0.0, std::abs(exact.u - mean) - 0.5) / sd;
    double approx = std::erfc(z / std::sqrt(2.0));
    if (std::abs(approx - exact.p_two_sided) > 0.02) {
      ok = false;
      detail = "approximation off by " + std::to_string(std::abs(approx - exact.p_two_sided));
    }
  }
  report(5, ok,
         "exact p equals enumeration for all size pairs <= 10; approximation within 0.02",
         detail);
}

// --- criteria 6 + 7: coverage comparison and exception-type superset -------
void criteria_bench(const Options& opt) {
  const int repeats = opt.smoke ? 15 : 30;
  const int budget = opt.smoke ? 20 : 60;
  fs::path report_path = fs::temp_directory_path() / "gfuzz_acceptance_bench.jsonl";
  std::string args = "bench --grammar " + (fs::path(opt.data) / "grammars/json.g").string() +
                     " --seeds " + (fs::path(opt.data) / "seeds/json").string() +
                     " --target builtin:json --budget-secs " + std::to_string(budget) +
                     " --repeats " + std::to_string(repeats) +
                     " --rng-seed 20240810 --report " + report_path.string();
  int rc = run_cli(opt, args);
  if (rc != 0) {
    report(6, false, "coverage comparison", "bench exited with " + std::to_string(rc));
    report(7, false, "exception-type superset", "bench exited with " + std::to_string(rc));
    return;
  }

  double evo_median = -1, base_median = -1, p_value = 1.0;
  int evo_depth_runs = 0;
  std::set<std::string> evo_types, base_types;
  std::ifstream in(report_path);
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (j["kind"] == "bench_summary") {
      evo_median = j["evo_median_coverage"].get<double>();
      base_median = j["baseline_median_coverage"].get<double>();
      p_value = j["p_value"].get<double>();
      evo_depth_runs = j["evo_depth_error_runs"].get<int>();
      for (const auto& t : j["evo_exception_types"]) evo_types.insert(t.get<std::string>());
      for (const auto& t : j["baseline_exception_types"])
        base_types.insert(t.get<std::string>());
    }
  }

  {
    bool ordering = evo_median >= base_median;
    bool significant = p_value < 0.05;
    bool ok = opt.smoke ? ordering : (ordering && significant);
    std::ostringstream detail;
    detail << "evo median " << evo_median << "%, baseline median " << base_median
           << "%, p = " << p_value << (opt.smoke ? " [smoke: ordering only]" : "");
    report(6, ok, "evolutionary median branch coverage >= baseline with p < 0.05",
           detail.str());
  }
  {
    int needed = (repeats * 20 + 29) / 30;  // "20 of 30" scaled to the repeat count
    bool depth_ok = evo_depth_runs >= needed;
    bool superset = std::includes(evo_types.begin(), evo_types.end(), base_types.begin(),
                                  base_types.end());
    std::ostringstream detail;
    detail << "DepthError in " << evo_depth_runs << "/" << repeats
           << " evolutionary runs; baseline types:";
    for (const auto& t : base_types) detail << " " << t;
    detail << "; evolutionary types:";
    for (const auto& t : evo_types) detail << " " << t;
    report(7, depth_ok && superset,
           "evolutionary triggers DepthError in >= 20/30 runs and supersets baseline types",
           detail.str());
  }
}

// --- criterion 8: determinism ------------------------------------------------
void criterion_determinism(const Options& opt) {
  fs::path out1 = fs::temp_directory_path() / "gfuzz_acc_det1";
  fs::path out2 = fs::temp_directory_path() / "gfuzz_acc_det2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  std::string common = "fuzz --grammar " + (fs::path(opt.data) / "grammars/json.g").string() +
                       " --seeds " + (fs::path(opt.data) / "seeds/json").string() +
                       " --target builtin:json --mode evo --budget-secs 2 --virtual-clock"
                       " --rng-seed 424242 --out ";
  int rc1 =
      run_cli(opt, common + out1.string() + " --report " + (out1 / "report.jsonl").string());
  int rc2 =
      run_cli(opt, common + out2.string() + " --report " + (out2 / "report.jsonl").string());
  bool ok = rc1 == 0 && rc2 == 0;
  std::string detail;
  if (!ok) detail = "runs exited with " + std::to_string(rc1) + "/" + std::to_string(rc2);
  if (ok) {
    std::string r1 = read_file(out1 / "report.jsonl");
    std::string r2 = read_file(out2 / "report.jsonl");
    ok = !r1.empty() && r1 == r2;
    if (!ok) detail = "reports differ";
  }
  report(8, ok, "two identically seeded runs produce byte-identical reports", detail);
}

// --- criterion 9: steering ----------------------------------------------------
void criterion_steering(const Options& opt) {
  Grammar g = load_grammar(opt, "list.g");
  std::vector<std::string> seeds = read_seed_dir(fs::path(opt.data) / "seeds/list");
  double seed_value = learn_from_corpus(g, seeds).pg.prob("items", 1);

  int successes = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    CampaignConfig cfg;
    cfg.population_size = 100;
    cfg.rng_seed = 9000 + static_cast<uint64_t>(r);
    cfg.max_generations = 10;
    cfg.time_budget_secs = 1e9;
    double last_learned = seed_value;
    CampaignHooks hooks;
    hooks.on_grammar = [&](int, const ProbabilisticGrammar& learned,
                           const ProbabilisticGrammar&) {
      last_learned = learned.prob("items", 1);
    };
    VirtualClock clock;
    run_campaign(cfg, g, seeds, TargetSpec::builtin("ok"), clock, hooks);
    if (last_learned > seed_value) ++successes;
  }
  std::ostringstream detail;
  detail << successes << "/" << runs << " runs above the seed-learned value " << seed_value;
  report(9, successes >= 15,
         "structure fitness steers the recursive items choice upward in >= 15/20 runs",
         detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc)
      opt.cli = argv[++i];
    else if (arg == "--data" && i + 1 < argc)
      opt.data = argv[++i];
    else if (arg == "--smoke")
      opt.smoke = true;
    else if (arg == "--only" && i + 1 < argc)
      opt.only = std::atoi(argv[++i]);
    else {
      std::cerr << "usage: acceptance --cli <gfuzz binary> --data <repo root> [--smoke]"
                   " [--only N]\n";
      return 2;
    }
  }
  if (opt.cli.empty() || opt.data.empty()) {
    std::cerr << "acceptance: --cli and --data are required\n";
    return 2;
  }

  auto want = [&](int k) { return opt.only == 0 || opt.only == k; };
  if (want(1)) criterion_simplex(opt);
  if (want(2)) criterion_roundtrip(opt);
  if (want(3)) criterion_recovery(opt);
  if (want(4)) criterion_fitness(opt);
  if (want(5)) criterion_mann_whitney(opt);
  if (want(6) || want(7)) criteria_bench(opt);
  if (want(8)) criterion_determinism(opt);
  if (want(9)) criterion_steering(opt);

  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
