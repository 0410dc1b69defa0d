// gfuzz: grammar-based fuzzing with learned choice probabilities.
//
// Subcommands:
//   learn     parse a seed corpus and write the learned probabilistic grammar
//   generate  sample inputs from a probabilistic grammar file
//   fuzz      run an evolutionary or baseline fuzzing campaign
//   bench     compare both campaign modes over repeated runs

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "gfuzz/campaign.hpp"
#include "gfuzz/earley.hpp"
#include "gfuzz/grammar_text.hpp"
#include "gfuzz/report_io.hpp"
#include "gfuzz/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace gfuzz;

namespace {

constexpr int kExitError = 1;    // bad inputs (grammar, seeds, config)
constexpr int kExitAdapter = 3;  // harness/adapter failure

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

// Seed corpus: every regular file in the directory, one input per file,
// loaded in file-name order.
std::vector<std::string> read_seed_dir(const fs::path& dir, std::vector<std::string>* names) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("seeds directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> seeds;
  for (const fs::path& p : files) {
    seeds.push_back(read_file(p));
    if (names) names->push_back(p.filename().string());
  }
  return seeds;
}

struct TargetOptions {
  std::string spec = "builtin:json";
  int timeout_ms = 3000;
  std::string config_path;  // optional classifier config (JSON)
};

TargetSpec make_target(const TargetOptions& opt) {
  TargetSpec target;
  if (opt.spec.rfind("builtin:", 0) == 0) {
    std::string name = opt.spec.substr(8);
    if (!builtin_target_exists(name))
      throw std::runtime_error("unknown built-in target '" + name + "'");
    target = TargetSpec::builtin(name);
  } else if (opt.spec.rfind("cmd:", 0) == 0) {
    target = TargetSpec::external(opt.spec.substr(4), opt.timeout_ms);
  } else {
    throw std::runtime_error("target must be builtin:<name> or cmd:<template>, got '" +
                             opt.spec + "'");
  }
  target.timeout_ms = opt.timeout_ms;
  if (!opt.config_path.empty()) {
    auto j = nlohmann::json::parse(read_file(opt.config_path));
    for (const auto& entry : j.value("classifiers", nlohmann::json::array()))
      target.classifiers.push_back(
          {entry.at("pattern").get<std::string>(), entry.value("type_group", 1)});
    target.nonzero_exit_is_exception = j.value("nonzero_exit_is_exception", true);
  }
  return target;
}

Grammar load_grammar_checked(const std::string& path) {
  Grammar g = parse_grammar_text(read_file(path));
  auto findings = validate(g);
  if (!findings.empty()) {
    for (const auto& f : findings) std::cerr << "gfuzz: grammar: " << f.message << "\n";
    throw std::runtime_error("grammar '" + path + "' failed validation");
  }
  return g;
}

int cmd_learn(const std::string& grammar_path, const std::string& seeds_dir,
              const std::string& out_path) {
  Grammar g = load_grammar_checked(grammar_path);
  std::vector<std::string> names;
  std::vector<std::string> seeds = read_seed_dir(seeds_dir, &names);
  if (seeds.empty()) {
    std::cerr << "gfuzz: no seed files in '" << seeds_dir << "'\n";
    return kExitError;
  }
  CorpusLearnResult result = learn_from_corpus(g, seeds);
  for (size_t i = 0; i < result.statuses.size(); ++i)
    if (!result.statuses[i].ok)
      std::cerr << "gfuzz: seed '" << names[i] << "' skipped: " << result.statuses[i].error
                << "\n";
  write_file(out_path, write_probabilistic_grammar_text(result.pg));
  std::cout << "parsed " << result.parsed << "/" << result.statuses.size()
            << " seeds (" << result.failed << " failed); wrote " << out_path << "\n";
  return 0;
}

int cmd_generate(const std::string& grammar_path, size_t count, uint64_t seed,
                 int depth_limit, uint64_t max_expansions, const std::string& out_dir,
                 bool check_roundtrip) {
  ProbabilisticGrammar pg = parse_probabilistic_grammar_text(read_file(grammar_path));
  GeneratorLimits limits{depth_limit, max_expansions};
  Population pop = generate_population(pg, count, limits, seed, 0);
  fs::create_directories(out_dir);
  EarleyParser parser(pg.grammar());
  for (const Individual& ind : pop.individuals) {
    write_file(fs::path(out_dir) / individual_file_name(0, ind.index), ind.text);
    if (check_roundtrip) {
      DerivationTree tree = parser.parse(ind.text);
      if (tree.yield() != ind.text)
        throw std::runtime_error("round-trip mismatch on individual " +
                                 std::to_string(ind.index));
    }
  }
  std::cout << "wrote " << pop.size() << " inputs to " << out_dir
            << (check_roundtrip ? " (round-trip checked)" : "") << "\n";
  return 0;
}

struct FuzzOptions {
  std::string grammar_path;
  std::string seeds_dir;
  TargetOptions target;
  std::string mode = "evo";
  CampaignConfig cfg;
  bool lambda_given = false;
  bool virtual_clock = false;
  std::string out_dir = "gfuzz_out";
  std::string report_path;  // default <out>/report.jsonl
};

void apply_lambda_default(CampaignConfig& cfg, bool lambda_given, const TargetSpec& target) {
  // JSON-flavored targets default to the lower length weight.
  if (!lambda_given && target.kind == TargetSpec::Kind::builtin &&
      target.builtin_name == "json")
    cfg.lambda = 1.5;
}

int cmd_fuzz(FuzzOptions opt) {
  Grammar g = load_grammar_checked(opt.grammar_path);
  std::vector<std::string> seeds = read_seed_dir(opt.seeds_dir, nullptr);
  TargetSpec target = make_target(opt.target);
  apply_lambda_default(opt.cfg, opt.lambda_given, target);
  opt.cfg.mode = opt.mode == "baseline" ? CampaignConfig::Mode::baseline
                                        : CampaignConfig::Mode::evolutionary;

  fs::create_directories(opt.out_dir);
  if (opt.report_path.empty())
    opt.report_path = (fs::path(opt.out_dir) / "report.jsonl").string();
  ReportWriter writer(opt.report_path);

  size_t archive_ordinal = 0;
  CampaignHooks hooks;
  hooks.on_generation = [&](const GenerationRecord& rec) { writer.generation(rec); };
  hooks.on_exception = [&](const ExceptionEvent& event) {
    std::string rel = archive_file_name(archive_ordinal++, event.type);
    write_file(fs::path(opt.out_dir) / rel, event.input);
    writer.exception(event, rel);
  };

  std::unique_ptr<CampaignClock> clock;
  if (opt.virtual_clock)
    clock = std::make_unique<VirtualClock>();
  else
    clock = std::make_unique<RealClock>();

  CampaignReport report =
      opt.cfg.mode == CampaignConfig::Mode::baseline
          ? run_baseline(opt.cfg, g, seeds, target, *clock, hooks)
          : run_campaign(opt.cfg, g, seeds, target, *clock, hooks);
  writer.summary(report.summary);

  std::cout << "generations: " << report.summary.generations
            << ", inputs: " << report.summary.inputs_executed
            << ", unique exception types: " << report.summary.unique_exception_types << "\n";
  for (const std::string& type : report.exception_types) std::cout << "  " << type << "\n";
  if (target.kind == TargetSpec::Kind::builtin) {
    int total = builtin_target_branch_total(target.builtin_name);
    if (total > 0) {
      auto cov = coverage_union_sets(report.coverage, total);
      std::cout << "branch coverage: " << cov.covered.size() << "/" << total << " ("
                << cov.percent << "%)\n";
    }
  }
  return 0;
}

struct BenchOptions {
  std::string grammar_path;
  std::string seeds_dir;
  TargetOptions target;
  CampaignConfig cfg;
  bool lambda_given = false;
  int repeats = 30;
  int parallel = 1;
  uint64_t master_seed = 0;
  std::string report_path;
};

struct BenchRun {
  int mode_index;  // 0 = evo, 1 = baseline
  int run;
  uint64_t seed;
  double coverage_percent = 0.0;
  std::set<std::string> exception_types;
  int generations = 0;
  uint64_t inputs = 0;
};

int cmd_bench(BenchOptions opt) {
  Grammar g = load_grammar_checked(opt.grammar_path);
  std::vector<std::string> seeds = read_seed_dir(opt.seeds_dir, nullptr);
  TargetSpec target = make_target(opt.target);
  apply_lambda_default(opt.cfg, opt.lambda_given, target);
  if (target.kind != TargetSpec::Kind::builtin ||
      builtin_target_branch_total(target.builtin_name) == 0)
    throw std::runtime_error("bench requires a coverage-instrumented built-in target");
  if (opt.repeats < 1) throw std::runtime_error("--repeats must be at least 1");
  const int total_branches = builtin_target_branch_total(target.builtin_name);

  std::vector<BenchRun> runs;
  for (int k = 0; k < opt.repeats; ++k)
    for (int mode = 0; mode < 2; ++mode)
      runs.push_back({mode, k,
                      opt.master_seed * 2 + static_cast<uint64_t>(mode) +
                          2 * static_cast<uint64_t>(k)});

  auto execute_run = [&](BenchRun& r) {
    CampaignConfig cfg = opt.cfg;
    cfg.rng_seed = r.seed;
    cfg.mode = r.mode_index == 0 ? CampaignConfig::Mode::evolutionary
                                 : CampaignConfig::Mode::baseline;
    RealClock clock;
    CampaignReport report = cfg.mode == CampaignConfig::Mode::baseline
                                ? run_baseline(cfg, g, seeds, target, clock)
                                : run_campaign(cfg, g, seeds, target, clock);
    r.coverage_percent = coverage_union_sets(report.coverage, total_branches).percent;
    r.exception_types = report.exception_types;
    r.generations = report.summary.generations;
    r.inputs = report.summary.inputs_executed;
  };

  if (opt.parallel <= 1) {
    for (BenchRun& r : runs) {
      execute_run(r);
      std::cerr << "bench: " << (r.mode_index == 0 ? "evo" : "baseline") << " run " << r.run
                << ": coverage " << r.coverage_percent << "%\n";
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < opt.parallel; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1))
          execute_run(runs[i]);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<double> evo, base;
  std::set<std::string> evo_types, base_types;
  int evo_depth_hits = 0;
  for (const BenchRun& r : runs) {
    if (r.mode_index == 0) {
      evo.push_back(r.coverage_percent);
      evo_types.insert(r.exception_types.begin(), r.exception_types.end());
      if (r.exception_types.count("DepthError")) ++evo_depth_hits;
    } else {
      base.push_back(r.coverage_percent);
      base_types.insert(r.exception_types.begin(), r.exception_types.end());
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  MannWhitneyResult mw = mann_whitney_u(evo, base);

  std::unique_ptr<ReportWriter> writer;
  if (!opt.report_path.empty()) writer = std::make_unique<ReportWriter>(opt.report_path);
  if (writer) {
    for (const BenchRun& r : runs) {
      ordered_json j;
      j["kind"] = "bench_run";
      j["mode"] = r.mode_index == 0 ? "evo" : "baseline";
      j["run"] = r.run;
      j["seed"] = r.seed;
      j["coverage_percent"] = r.coverage_percent;
      j["exception_types"] = r.exception_types;
      j["generations"] = r.generations;
      j["inputs"] = r.inputs;
      writer->line(j.dump());
    }
  }
  ordered_json summary;
  summary["kind"] = "bench_summary";
  summary["repeats"] = opt.repeats;
  summary["evo_median_coverage"] = median(evo);
  summary["baseline_median_coverage"] = median(base);
  summary["u"] = mw.u;
  summary["p_value"] = mw.p_two_sided;
  summary["evo_exception_types"] = evo_types;
  summary["baseline_exception_types"] = base_types;
  summary["evo_depth_error_runs"] = evo_depth_hits;
  if (writer) writer->line(summary.dump());

  std::cout << "evolutionary median coverage: " << median(evo) << "%\n";
  std::cout << "baseline     median coverage: " << median(base) << "%\n";
  std::cout << "Mann-Whitney U = " << mw.u << ", two-sided p = " << mw.p_two_sided << "\n";
  std::cout << summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grammar-based fuzzing with learned choice probabilities"};
  app.require_subcommand(1);

  // learn ------------------------------------------------------------------
  auto* learn = app.add_subcommand("learn", "learn choice probabilities from seeds");
  std::string learn_grammar, learn_seeds, learn_out = "learned.pg";
  learn->add_option("--grammar", learn_grammar, "grammar file")->required();
  learn->add_option("--seeds", learn_seeds, "seed corpus directory")->required();
  learn->add_option("--out", learn_out, "output probabilistic grammar file");

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "sample inputs from a probabilistic grammar");
  std::string gen_grammar, gen_out = "generated";
  size_t gen_count = 100;
  uint64_t gen_seed = 0;
  int gen_depth = 64;
  uint64_t gen_max_exp = 50000;
  bool gen_check = false;
  gen->add_option("--grammar", gen_grammar, "probabilistic grammar file")->required();
  gen->add_option("--count", gen_count, "number of inputs");
  gen->add_option("--rng-seed", gen_seed, "random seed");
  gen->add_option("--depth-limit", gen_depth, "derivation depth limit");
  gen->add_option("--max-expansions", gen_max_exp, "safety cap on rule applications");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--check-roundtrip", gen_check, "re-parse every generated input");

  // fuzz ---------------------------------------------------------------
  auto* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  FuzzOptions fo;
  fuzz->add_option("--grammar", fo.grammar_path, "grammar file")->required();
  fuzz->add_option("--seeds", fo.seeds_dir, "seed corpus directory")->required();
  fuzz->add_option("--target", fo.target.spec, "builtin:<name> or cmd:<template with {}>");
  fuzz->add_option("--mode", fo.mode, "evo|baseline")
      ->check(CLI::IsMember({"evo", "baseline"}));
  fuzz->add_option("--budget-secs", fo.cfg.time_budget_secs, "time budget in seconds");
  fuzz->add_option("--population", fo.cfg.population_size, "population size");
  fuzz->add_option("--elitism", fo.cfg.elitism_rate, "elite fraction of the population");
  fuzz->add_option("--tournaments", fo.cfg.tournament_count, "tournaments per generation");
  fuzz->add_option("--tournament-size", fo.cfg.tournament_size, "participants per tournament");
  fuzz->add_option("--mutations", fo.cfg.mutation_count, "grammar mutations per generation");
  auto* lambda_opt = fuzz->add_option("--lambda", fo.cfg.lambda,
                                      "length weight of the structure score");
  fuzz->add_option("--depth-limit", fo.cfg.depth_limit, "derivation depth limit");
  fuzz->add_option("--max-expansions", fo.cfg.max_expansions,
                   "safety cap on rule applications per input");
  fuzz->add_option("--timeout-ms", fo.target.timeout_ms, "per-execution timeout");
  fuzz->add_option("--rng-seed", fo.cfg.rng_seed, "campaign random seed");
  fuzz->add_option("--max-generations", fo.cfg.max_generations,
                   "stop after this many generations (0 = budget only)");
  fuzz->add_option("--workers", fo.cfg.eval_workers, "parallel evaluation workers");
  fuzz->add_option("--out", fo.out_dir, "output directory (archive + default report)");
  fuzz->add_option("--report", fo.report_path, "report file (default <out>/report.jsonl)");
  fuzz->add_option("--config", fo.target.config_path,
                   "campaign config JSON (classifiers, exit-code policy)");
  fuzz->add_flag("--virtual-clock", fo.virtual_clock,
                 "deterministic clock: budget advances per execution");

  // bench ----------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "compare evolutionary vs baseline");
  BenchOptions bo;
  bench->add_option("--grammar", bo.grammar_path, "grammar file")->required();
  bench->add_option("--seeds", bo.seeds_dir, "seed corpus directory")->required();
  bench->add_option("--target", bo.target.spec, "built-in target (coverage required)");
  bench->add_option("--budget-secs", bo.cfg.time_budget_secs, "budget per run in seconds");
  bench->add_option("--repeats", bo.repeats, "runs per mode");
  bench->add_option("--population", bo.cfg.population_size, "population size");
  bench->add_option("--elitism", bo.cfg.elitism_rate, "elite fraction");
  bench->add_option("--tournaments", bo.cfg.tournament_count, "tournaments per generation");
  bench->add_option("--tournament-size", bo.cfg.tournament_size, "participants per tournament");
  bench->add_option("--mutations", bo.cfg.mutation_count, "grammar mutations per generation");
  auto* bench_lambda =
      bench->add_option("--lambda", bo.cfg.lambda, "length weight of the structure score");
  bench->add_option("--depth-limit", bo.cfg.depth_limit, "derivation depth limit");
  bench->add_option("--max-expansions", bo.cfg.max_expansions, "safety cap per input");
  bench->add_option("--timeout-ms", bo.target.timeout_ms, "per-execution timeout");
  bench->add_option("--rng-seed", bo.master_seed, "master seed; per-run seeds derive from it");
  bench->add_option("--report", bo.report_path, "write per-run and summary records here");
  bench->add_option("--parallel", bo.parallel, "run campaigns on this many threads");
  bench->add_option("--config", bo.target.config_path, "campaign config JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*learn) return cmd_learn(learn_grammar, learn_seeds, learn_out);
    if (*gen)
      return cmd_generate(gen_grammar, gen_count, gen_seed, gen_depth, gen_max_exp, gen_out,
                          gen_check);
    if (*fuzz) {
      fo.lambda_given = lambda_opt->count() > 0;
      return cmd_fuzz(std::move(fo));
    }
    if (*bench) {
      bo.lambda_given = bench_lambda->count() > 0;
      return cmd_bench(std::move(bo));
    }
  } catch (const TargetError& e) {
    std::cerr << "gfuzz: adapter failure: " << e.what() << "\n";
    return kExitAdapter;
  } catch (const std::exception& e) {
    std::cerr << "gfuzz: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
