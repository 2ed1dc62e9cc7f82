#include "keysel/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/core.h>

#include "keysel/error.hpp"
#include "keysel/random.hpp"

namespace keysel {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kValidationStream = 1;
constexpr std::uint64_t kGaStream = 2;

}  // namespace

EvalSplitMode parse_eval_split(std::string_view name) {
  if (name == "test") return EvalSplitMode::kTest;
  if (name == "validation") return EvalSplitMode::kValidation;
  throw config_error(fmt::format("unknown eval split '{}' (expected test or validation)", name));
}

DictScope parse_dict_scope(std::string_view name) {
  if (name == "train") return DictScope::kTrain;
  if (name == "corpus") return DictScope::kCorpus;
  throw config_error(fmt::format("unknown dictionary scope '{}' (expected train or corpus)", name));
}

std::string_view name_of(EvalSplitMode mode) {
  return mode == EvalSplitMode::kTest ? "test" : "validation";
}

std::string_view name_of(DictScope scope) { return scope == DictScope::kTrain ? "train" : "corpus"; }

void RunConfig::validate() const {
  if (corpus_root.empty()) throw config_error("corpus root is not set");
  if (train_count == 0) throw config_error("train count must be positive");
  pool.validate();
  if (knn.k == 0) throw config_error("k must be positive");
  if (eval_split == EvalSplitMode::kValidation &&
      !(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw config_error(fmt::format("validation fraction {} outside (0, 1)", validation_fraction));
  }
  if (ga.max_generations == 0) throw config_error("max_generations must be set to a positive value");
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json ga = {
      {"pop_size", cfg.ga.pop_size},
      {"chromosome_size", cfg.ga.chromosome_size},
      {"elite_count", cfg.ga.elite_count},
      {"crossover_fraction", cfg.ga.crossover_fraction},
      {"mutation_rate", cfg.ga.effective_mutation_rate()},
      {"max_generations", cfg.ga.max_generations},
      {"stall_generations", cfg.ga.stall_generations},
      {"target_fitness", cfg.ga.target_fitness},
  };
  return {
      {"corpus_root", cfg.corpus_root.generic_string()},
      {"encoding", cfg.encoding == Encoding::kUtf8 ? "utf-8" : "latin1"},
      {"train_count", cfg.train_count},
      {"seed", cfg.seed},
      {"pool", {{"p_min", cfg.pool.p_min}, {"p_max", cfg.pool.p_max}, {"max_words", cfg.pool.max_words}}},
      {"dict_scope", name_of(cfg.dict_scope)},
      {"k", cfg.knn.k},
      {"ga", std::move(ga)},
      {"eval_split", name_of(cfg.eval_split)},
      {"validation_fraction", cfg.validation_fraction},
  };
}

Pipeline prepare_pipeline(const RunConfig& cfg, const Corpus& corpus) {
  cfg.validate();
  if (corpus.categories().size() < 2) {
    throw input_error(fmt::format("classification needs at least 2 categories, corpus has {}",
                                  corpus.categories().size()));
  }

  Pipeline p;
  p.corpus = corpus;
  p.split = split_corpus(p.corpus, cfg.train_count, cfg.seed);
  if (cfg.eval_split == EvalSplitMode::kTest) {
    p.fit_train_ids = p.split.train;
    p.fit_eval_ids = p.split.test;
  } else {
    const auto n_val = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(p.split.train.size())));
    const auto inner = split_ids(p.corpus, p.split.train, p.split.train.size() - n_val,
                                 derive_seed(cfg.seed, kValidationStream));
    p.fit_train_ids = inner.train;
    p.fit_eval_ids = inner.test;
  }

  const auto all_ids = p.corpus.ids();
  const std::span<const std::string> dict_ids =
      cfg.dict_scope == DictScope::kTrain ? std::span<const std::string>(p.split.train)
                                          : std::span<const std::string>(all_ids);
  p.dictionary = build_frequency_dictionary(p.corpus, dict_ids);
  p.pool = select_pool(p.dictionary, cfg.pool);

  p.train = build_feature_matrix(p.corpus, p.split.train, p.pool.words);
  p.test = build_feature_matrix(p.corpus, p.split.test, p.pool.words);
  p.fit_train = build_feature_matrix(p.corpus, p.fit_train_ids, p.pool.words);
  p.fit_eval = build_feature_matrix(p.corpus, p.fit_eval_ids, p.pool.words);
  return p;
}

Pipeline prepare_pipeline(const RunConfig& cfg) {
  cfg.validate();
  LoadOptions options;
  options.encoding = cfg.encoding;
  return prepare_pipeline(cfg, load_corpus(cfg.corpus_root, options));
}

EvalReport evaluate_subset(const FeatureMatrix& train, const FeatureMatrix& eval,
                           const Chromosome& chromosome, const KnnConfig& knn) {
  return evaluate(project(train, chromosome.genes()), project(eval, chromosome.genes()), knn);
}

FitnessFn make_fitness(const FeatureMatrix& train, const FeatureMatrix& eval, KnnConfig knn) {
  knn.threads = 1;
  return [&train, &eval, knn](const Chromosome& c) {
    return evaluate_subset(train, eval, c, knn).fitness;
  };
}

std::vector<std::string> report_words(const KeywordPool& pool, const Chromosome& chromosome) {
  std::vector<std::string> words;
  words.reserve(chromosome.size());
  for (const auto g : chromosome.genes()) {
    if (g >= pool.size()) {
      throw internal_error(fmt::format("gene {} outside pool of {} words", g, pool.size()));
    }
    words.push_back(pool.words[g]);
  }
  return words;
}

nlohmann::json best_to_json(const RunReport& report) {
  return {{"fitness", report.best.fitness},
          {"indices", std::vector<std::size_t>(report.best.chromosome.genes().begin(),
                                               report.best.chromosome.genes().end())},
          {"words", report.words}};
}

nlohmann::json to_json(const RunReport& report) {
  return {{"best", best_to_json(report)},
          {"test_report", to_json(report.test_report)},
          {"generations", report.evolution.trace.size()},
          {"stop_reason", stop_reason_name(report.evolution.stop_reason)},
          {"pool_size", report.pool.size()},
          {"config", report.config},
          {"wall_time_seconds", report.wall_time_seconds}};
}

RunReport run_pipeline(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Pipeline p = prepare_pipeline(cfg);

  GaConfig ga = cfg.ga;
  ga.seed = derive_seed(cfg.seed, kGaStream);
  ga.threads = cfg.threads;
  if (cfg.knn.k > p.fit_train.cols()) {
    throw config_error(fmt::format("k={} exceeds the {} fitness training documents", cfg.knn.k,
                                   p.fit_train.cols()));
  }

  RunReport report;
  report.evolution = evolve(p.pool.size(), ga, make_fitness(p.fit_train, p.fit_eval, cfg.knn));
  report.best = report.evolution.best;
  report.words = report_words(p.pool, report.best.chromosome);
  KnnConfig final_knn = cfg.knn;
  final_knn.threads = cfg.threads;
  report.test_report = evaluate_subset(p.train, p.test, report.best.chromosome, final_knn);
  report.pool = p.pool;
  report.config = to_json(cfg);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_per_category_csv(const EvalReport& report, std::ostream& out) {
  const auto cell = [](const std::optional<double>& v) {
    return v ? fmt::format("{}", *v) : std::string();
  };
  out << "category,precision,recall\n";
  for (const auto& s : report.categories) {
    out << fmt::format("{},{},{}\n", s.name, cell(s.precision), cell(s.recall));
  }
}

namespace {

// Removes every file it created unless commit() was called.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {}
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : written_) fs::remove(f, ec);
  }

  template <typename WriteFn>
  void write(const std::string& name, WriteFn&& fn) {
    const auto path = dir_ / name;
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(fmt::format("cannot open '{}' for writing", path.string()));
    fn(out);
    out.flush();
    if (!out) throw io_error(fmt::format("failed writing '{}'", path.string()));
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw io_error(fmt::format("cannot create output directory '{}'", dir.string()));
  }
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw config_error("output directory is not set");
  auto report = run_pipeline(cfg);
  ensure_dir(cfg.output_dir);

  OutputGuard guard(cfg.output_dir);
  guard.write("trace.csv", [&](std::ostream& o) { write_trace_csv(report.evolution.trace, o); });
  guard.write("report.json", [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
  guard.write("per_category.csv", [&](std::ostream& o) { write_per_category_csv(report.test_report, o); });
  guard.write("pool.csv", [&](std::ostream& o) { write_pool_csv(report.pool, o); });
  guard.commit();
  return report;
}

nlohmann::json run_repeated(const RunConfig& cfg, std::size_t repeats) {
  if (repeats == 0) throw config_error("repeat count must be positive");
  ensure_dir(cfg.output_dir);

  std::vector<double> fitness, pr, rc;
  auto runs = nlohmann::json::array();
  for (std::size_t r = 0; r < repeats; ++r) {
    RunConfig one = cfg;
    one.seed = cfg.seed + r;
    one.output_dir = cfg.output_dir / fmt::format("seed_{}", one.seed);
    const auto report = run(one);
    fitness.push_back(report.best.fitness);
    pr.push_back(report.test_report.pr_avg);
    rc.push_back(report.test_report.rc_avg);
    runs.push_back({{"seed", one.seed},
                    {"fitness", report.best.fitness},
                    {"pr_avg", report.test_report.pr_avg},
                    {"rc_avg", report.test_report.rc_avg}});
  }

  const auto stats = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (const double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    return nlohmann::json{{"mean", mean}, {"stddev", sd}};
  };
  nlohmann::json summary = {{"runs", std::move(runs)},
                            {"fitness", stats(fitness)},
                            {"pr_avg", stats(pr)},
                            {"rc_avg", stats(rc)}};
  OutputGuard guard(cfg.output_dir);
  guard.write("summary.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  guard.commit();
  return summary;
}

}  // namespace keysel
