#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "keysel/corpus.hpp"
#include "keysel/freqdict.hpp"
#include "keysel/ga.hpp"
#include "keysel/knn.hpp"
#include "keysel/vectorspace.hpp"

namespace keysel {

// Where the GA measures fitness. kTest scores chromosomes on the test split
// itself; kValidation carves a validation subset out of the training split
// and keeps the test split for the final report only.
enum class EvalSplitMode { kTest, kValidation };
enum class DictScope { kTrain, kCorpus };

EvalSplitMode parse_eval_split(std::string_view name);
DictScope parse_dict_scope(std::string_view name);
std::string_view name_of(EvalSplitMode mode);
std::string_view name_of(DictScope scope);

struct RunConfig {
  std::filesystem::path corpus_root;
  Encoding encoding = Encoding::kUtf8;
  std::size_t train_count = 0;
  // Master seed; the split, validation carve-out and GA draw derived streams.
  std::uint64_t seed = 0;
  PoolConfig pool;
  DictScope dict_scope = DictScope::kTrain;
  KnnConfig knn;
  GaConfig ga;
  EvalSplitMode eval_split = EvalSplitMode::kTest;
  double validation_fraction = 0.25;
  std::filesystem::path output_dir;
  std::size_t threads = 1;

  void validate() const;
};

// Echo of every result-affecting field (thread counts are omitted).
nlohmann::json to_json(const RunConfig& cfg);

// Everything the GA needs, built once from a RunConfig.
struct Pipeline {
  Corpus corpus;
  Split split;
  std::vector<std::string> fit_train_ids;  // training side of the fitness measurement
  std::vector<std::string> fit_eval_ids;   // scored side of the fitness measurement
  FrequencyDictionary dictionary;
  KeywordPool pool;
  FeatureMatrix fit_train;
  FeatureMatrix fit_eval;
  FeatureMatrix train;
  FeatureMatrix test;
};

Pipeline prepare_pipeline(const RunConfig& cfg, const Corpus& corpus);
Pipeline prepare_pipeline(const RunConfig& cfg);

// 1 - macro precision of kNN on the chromosome's keyword subspace.
FitnessFn make_fitness(const FeatureMatrix& train, const FeatureMatrix& eval, KnnConfig knn);

EvalReport evaluate_subset(const FeatureMatrix& train, const FeatureMatrix& eval,
                           const Chromosome& chromosome, const KnnConfig& knn);

// Pool words at the chromosome's indices, in chromosome order.
std::vector<std::string> report_words(const KeywordPool& pool, const Chromosome& chromosome);

struct RunReport {
  ScoredChromosome best;
  std::vector<std::string> words;
  EvalReport test_report;
  EvolutionResult evolution;
  KeywordPool pool;
  nlohmann::json config;
  double wall_time_seconds = 0.0;
};

nlohmann::json best_to_json(const RunReport& report);
nlohmann::json to_json(const RunReport& report);

// Runs the pipeline without touching the filesystem beyond reading the corpus.
RunReport run_pipeline(const RunConfig& cfg);

// Runs the pipeline and writes trace.csv, report.json, per_category.csv and
// pool.csv into cfg.output_dir. On failure no partial outputs are left.
RunReport run(const RunConfig& cfg);

// Repeats `run` with seeds seed, seed+1, ... into <output_dir>/seed_<s> and
// writes <output_dir>/summary.json with mean and standard deviation of the
// fitness and averaged precision/recall.
nlohmann::json run_repeated(const RunConfig& cfg, std::size_t repeats);

void write_per_category_csv(const EvalReport& report, std::ostream& out);

}  // namespace keysel
