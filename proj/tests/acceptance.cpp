// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds are fixed here and must not be tuned per run.

#include <chrono>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "keysel/error.hpp"
#include "keysel/runner.hpp"
#include "keysel/synth.hpp"
#include "support.hpp"

using namespace keysel;
using keysel::testing::read_text;
using keysel::testing::TempDir;
namespace fs = std::filesystem;

namespace {

constexpr double kMetricTolerance = 1e-12;
constexpr double kOracleRuntimeLimit = 60.0;      // seconds
constexpr double kPlantedRuntimeLimit = 300.0;    // seconds
constexpr double kPlantedMaxFitness = 0.10;
constexpr double kPlantedMinMarkerShare = 0.60;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Six authors, 30 documents each, three markers per author; one corpus per seed.
struct PlantedCorpora {
  TempDir dir;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<SynthManifest> manifests;

  PlantedCorpora() {
    for (const auto s : seeds) {
      SynthConfig sc;
      sc.docs_per_author = 30;
      sc.seed = s;
      manifests.push_back(make_synthetic_corpus(sc, root(s).parent_path()));
    }
  }
  fs::path root(std::uint64_t seed) const { return dir.path() / fmt::format("s{}", seed) / "corpus"; }

  RunConfig config(std::uint64_t seed, std::size_t chromosome_size) const {
    RunConfig cfg;
    cfg.corpus_root = root(seed);
    cfg.train_count = 90;
    cfg.seed = seed;
    cfg.pool = {0.003, 0.01, 1000};
    cfg.ga.chromosome_size = chromosome_size;
    cfg.ga.max_generations = 200;
    return cfg;
  }
};

PlantedCorpora& planted() {
  static PlantedCorpora corpora;
  return corpora;
}

Outcome oracle_equivalence() {
  TempDir tmp;
  SynthConfig sc;
  sc.n_authors = 4;
  sc.seed = 101;
  make_synthetic_corpus(sc, tmp.path());

  RunConfig cfg;
  cfg.corpus_root = tmp.path() / "corpus";
  cfg.train_count = 24;
  cfg.seed = 101;
  cfg.pool = {0.003, 0.01, 12};
  cfg.ga.chromosome_size = 3;
  cfg.ga.max_generations = 300;
  const auto p = prepare_pipeline(cfg);
  if (p.pool.size() != 12) return {false, fmt::format("pool has {} words, expected 12", p.pool.size())};
  const auto fitness = make_fitness(p.fit_train, p.fit_eval, cfg.knn);

  const auto t0 = std::chrono::steady_clock::now();
  const auto truth = exhaustive_best(12, 3, fitness);
  double ga_best = 2.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    GaConfig ga = cfg.ga;
    ga.seed = s;
    ga_best = std::min(ga_best, evolve(12, ga, fitness).best.fitness);
  }
  const double elapsed = seconds_since(t0);
  return {ga_best == truth.fitness && elapsed < kOracleRuntimeLimit,
          fmt::format("exhaustive {} over 220 subsets, GA min over 5 runs {}, {:.2f}s", truth.fitness,
                      ga_best, elapsed)};
}

Outcome elitism_monotonicity() {
  TempDir tmp;
  SynthConfig sc;
  sc.seed = 202;
  make_synthetic_corpus(sc, tmp.path());
  RunConfig base;
  base.corpus_root = tmp.path() / "corpus";
  base.train_count = 40;
  base.seed = 202;
  base.pool = {0.002, 0.02, 40};
  base.ga.max_generations = 1;
  const auto p = prepare_pipeline(base);
  const auto fitness = make_fitness(p.fit_train, p.fit_eval, base.knn);

  Rng rng(2020);
  std::size_t violations = 0;
  std::size_t generations = 0;
  for (int c = 0; c < 20; ++c) {
    GaConfig ga;
    ga.pop_size = 4 + rng.uniform_index(27);
    ga.elite_count = 1 + rng.uniform_index(std::min<std::uint64_t>(ga.pop_size - 1, 5));
    ga.chromosome_size = 1 + rng.uniform_index(12);
    ga.crossover_fraction = rng.uniform_unit();
    ga.mutation_rate = 0.01 + 0.99 * rng.uniform_unit();
    ga.max_generations = 10 + rng.uniform_index(31);
    ga.target_fitness = -1.0;
    ga.seed = rng.next_u64();
    const auto result = evolve(p.pool.size(), ga, fitness);
    generations += result.trace.size();
    for (std::size_t g = 1; g < result.trace.size(); ++g) {
      violations += result.trace[g].best_fitness > result.trace[g - 1].best_fitness;
    }
  }
  return {violations == 0,
          fmt::format("20 configs, {} generations checked, {} violations", generations, violations)};
}

Outcome metric_correctness() {
  Rng rng(303);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n_cat = 2 + rng.uniform_index(16);  // up to 17
    const std::size_t n = 1 + rng.uniform_index(300);
    std::vector<std::size_t> truth(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.uniform_index(n_cat);
      predicted[i] = rng.bernoulli(0.6) ? truth[i] : rng.uniform_index(n_cat);
    }
    ConfusionCounts counts(n_cat);
    std::vector<Category> cats;
    for (std::size_t c = 0; c < n_cat; ++c) cats.push_back({fmt::format("a{}", c), c});
    for (std::size_t i = 0; i < n; ++i) counts.add(truth[i], predicted[i]);
    const auto report = report_from_counts(counts, cats);
    const auto expect = keysel::testing::oracle_scores(truth, predicted, n_cat);

    const auto compare = [&](const std::optional<double>& a, const std::optional<double>& b) {
      if (a.has_value() != b.has_value()) {
        ++mismatches;
      } else if (a) {
        worst = std::max(worst, std::abs(*a - *b));
      }
    };
    for (std::size_t c = 0; c < n_cat; ++c) {
      compare(report.categories[c].precision, expect.precision[c]);
      compare(report.categories[c].recall, expect.recall[c]);
    }
    worst = std::max({worst, std::abs(report.pr_avg - expect.pr_avg),
                      std::abs(report.rc_avg - expect.rc_avg),
                      std::abs(report.fitness - (1.0 - expect.pr_avg))});
  }
  return {mismatches == 0 && worst <= kMetricTolerance,
          fmt::format("100 tables, definedness mismatches {}, max abs error {:.3g}", mismatches, worst)};
}

Outcome knn_correctness() {
  Rng rng(404);
  std::size_t checked = 0, disagreements = 0, self_total = 0, self_correct = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t dims = 1 + rng.uniform_index(8);
    const std::size_t n_train = 10 + rng.uniform_index(51);
    const std::size_t n_cat = 2 + rng.uniform_index(4);
    const bool grid = inst % 2 == 0;  // coarse values produce distance ties
    const auto draw = [&] {
      std::vector<double> v(dims);
      for (auto& x : v) x = grid ? std::round(rng.uniform_unit() * 3) / 3 : rng.uniform_unit();
      return v;
    };
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> labels;
    std::vector<std::string> keywords, ids;
    std::vector<double> values;
    for (std::size_t k = 0; k < dims; ++k) keywords.push_back(fmt::format("w{}", k));
    for (std::size_t j = 0; j < n_train; ++j) {
      pts.push_back(draw());
      labels.push_back(rng.uniform_index(n_cat));
      ids.push_back(fmt::format("doc{:03}", j));
      values.insert(values.end(), pts.back().begin(), pts.back().end());
    }
    std::vector<Category> cats;
    for (std::size_t c = 0; c < n_cat; ++c) cats.push_back({fmt::format("c{}", c), c});
    const FeatureMatrix train(keywords, ids, labels, cats, values);

    for (int q = 0; q < 10; ++q) {
      const auto query = draw();
      for (const std::size_t k : {1, 3, 5}) {
        ++checked;
        disagreements += classify(train, query, {k}) != keysel::testing::oracle_knn(pts, ids, labels, query, k);
      }
    }
    for (std::size_t j = 0; j < n_train; ++j) {
      ++self_total;
      self_correct += classify(train, train.column(j), {1}, ids[j]) == labels[j];
    }
  }
  const double self_accuracy = static_cast<double>(self_correct) / static_cast<double>(self_total);
  return {disagreements == 0 && self_accuracy == 1.0,
          fmt::format("{} queries x k in {{1,3,5}}: {} disagreements; self-query accuracy {}", checked / 3,
                      disagreements, self_accuracy)};
}

Outcome determinism() {
  TempDir tmp;
  SynthConfig sc;
  sc.seed = 505;
  make_synthetic_corpus(sc, tmp.path());
  RunConfig cfg;
  cfg.corpus_root = tmp.path() / "corpus";
  cfg.train_count = 40;
  cfg.seed = 505;
  cfg.pool = {0.003, 0.01, 40};
  cfg.ga.chromosome_size = 8;
  cfg.ga.max_generations = 40;

  const auto strip_wall_time = [](const fs::path& path) {
    auto j = nlohmann::json::parse(read_text(path));
    j.erase("wall_time_seconds");
    return j.dump();
  };
  std::vector<std::string> traces, reports;
  int i = 0;
  for (const std::size_t threads : {1, 1, 4, 4}) {
    RunConfig c = cfg;
    c.threads = threads;
    c.output_dir = tmp.path() / fmt::format("run{}", i++);
    run(c);
    traces.push_back(read_text(c.output_dir / "trace.csv"));
    reports.push_back(strip_wall_time(c.output_dir / "report.json"));
  }
  bool same = true;
  for (std::size_t r = 1; r < traces.size(); ++r) same = same && traces[r] == traces[0] && reports[r] == reports[0];
  return {same, fmt::format("4 runs (threads 1,1,4,4): trace.csv and report.json {}",
                            same ? "byte-identical" : "DIFFER")};
}

Outcome planted_marker_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  auto& pc = planted();
  std::vector<double> fitness, share;
  for (std::size_t i = 0; i < pc.seeds.size(); ++i) {
    const auto report = run_pipeline(pc.config(pc.seeds[i], 18));
    const auto markers = pc.manifests[i].all_markers();
    std::size_t hit = 0;
    for (const auto& w : report.words) hit += std::find(markers.begin(), markers.end(), w) != markers.end();
    fitness.push_back(report.best.fitness);
    share.push_back(static_cast<double>(hit) / static_cast<double>(markers.size()));
  }
  const double elapsed = seconds_since(t0);
  const double f = median(fitness);
  const double s = median(share);
  return {f <= kPlantedMaxFitness && s >= kPlantedMinMarkerShare && elapsed < kPlantedRuntimeLimit,
          fmt::format("median fitness {:.4f} (<= {}), median marker share {:.3f} (>= {}), {:.1f}s", f,
                      kPlantedMaxFitness, s, kPlantedMinMarkerShare, elapsed)};
}

Outcome dimensionality_direction() {
  auto& pc = planted();
  std::vector<double> f10, f30;
  for (const auto s : pc.seeds) {
    f10.push_back(run_pipeline(pc.config(s, 10)).best.fitness);
    f30.push_back(run_pipeline(pc.config(s, 30)).best.fitness);
  }
  return {mean(f30) <= mean(f10),
          fmt::format("mean best fitness size 30: {:.4f}, size 10: {:.4f}", mean(f30), mean(f10))};
}

Outcome pool_bound_exactness() {
  auto& pc = planted();
  const auto cfg = pc.config(pc.seeds[0], 18);
  const auto p = prepare_pipeline(cfg);

  // Recount training-split frequencies from the raw files.
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& id : p.split.train) {
    const auto toks = keysel::testing::reference_tokens(read_text(cfg.corpus_root / id));
    total += toks.size();
    for (const auto& t : toks) ++counts[t];
  }
  std::size_t outside = 0;
  for (const auto& w : p.pool.words) {
    const double f = static_cast<double>(counts[w]) / static_cast<double>(total);
    outside += !(f >= cfg.pool.p_min && f < cfg.pool.p_max);
  }

  // 8 tokens: "a" at exactly 0.25, "b" at exactly 0.125.
  const Corpus tiny({{"x", 0}}, {{"x/1", 0, tokenize("a a b c d e f g")}});
  const auto ids = tiny.ids();
  const auto dict = build_frequency_dictionary(tiny, ids);
  const auto band = select_pool(dict, {0.125, 0.25, 100});
  const bool edge_ok = std::find(band.words.begin(), band.words.end(), "a") == band.words.end() &&
                       std::find(band.words.begin(), band.words.end(), "b") != band.words.end();
  bool upper_ok = false;
  try {
    select_pool(dict, {0.2, 0.25, 100});  // only "a" is >= 0.2, and it sits on p_max
  } catch (const keysel::Error&) {
    upper_ok = true;
  }
  return {outside == 0 && edge_ok && upper_ok,
          fmt::format("{} pool words recomputed, {} outside [p_min, p_max); word at p_max {}", p.pool.size(),
                      outside, edge_ok && upper_ok ? "excluded, word at p_min included" : "MISHANDLED")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 oracle equivalence", oracle_equivalence},
      {"2 elitism monotonicity", elitism_monotonicity},
      {"3 metric correctness", metric_correctness},
      {"4 kNN correctness", knn_correctness},
      {"5 determinism", determinism},
      {"6 planted-marker recovery", planted_marker_recovery},
      {"7 dimensionality trade-off direction", dimensionality_direction},
      {"8 pool bound exactness", pool_bound_exactness},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    std::cout << fmt::format("[{}] {}: {}", o.pass ? "PASS" : "FAIL", name, o.detail) << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
