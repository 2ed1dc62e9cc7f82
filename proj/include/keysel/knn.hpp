#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "keysel/vectorspace.hpp"

namespace keysel {

double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct KnnConfig {
  std::size_t k = 1;
  // Worker threads for classifying test documents; results do not depend on it.
  std::size_t threads = 1;
};

// Majority category among the k training columns nearest to `query`.
//
// Neighbours are ranked by distance, then by doc id. A training column whose
// id equals `query_id` ranks ahead of any other column at the same distance,
// so a document always finds itself first. Vote ties go to whichever tied
// category owns the nearest neighbour, then to the lower category index.
std::size_t classify(const FeatureMatrix& train, std::span<const double> query, const KnnConfig& cfg,
                     std::optional<std::string_view> query_id = std::nullopt);

// counts[truth][predicted] over n categories.
class ConfusionCounts {
 public:
  explicit ConfusionCounts(std::size_t n_categories)
      : n_(n_categories), counts_(n_categories * n_categories, 0) {}

  void add(std::size_t truth, std::size_t predicted, std::size_t n = 1);
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * n_ + predicted];
  }
  std::size_t categories() const { return n_; }
  std::size_t total() const;
  std::size_t predicted_as(std::size_t category) const;
  std::size_t truly(std::size_t category) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

struct CategoryScore {
  std::string name;
  std::optional<double> precision;  // empty when nothing was predicted as this category
  std::optional<double> recall;     // empty when the category has no evaluated documents
};

struct EvalReport {
  std::vector<CategoryScore> categories;
  double pr_avg = 0.0;
  double rc_avg = 0.0;
  double fitness = 1.0;
};

// Macro-averaged precision/recall over the defined per-category values, and
// fitness = 1 - average precision. Throws an evaluation error when no
// precision is defined.
EvalReport report_from_counts(const ConfusionCounts& counts, std::span<const Category> categories);

double fitness_from_report(const EvalReport& report);

// Classifies every column of `test` against `train`.
ConfusionCounts confusion(const FeatureMatrix& train, const FeatureMatrix& test, const KnnConfig& cfg);

EvalReport evaluate(const FeatureMatrix& train, const FeatureMatrix& test, const KnnConfig& cfg);

// {categories: [{name, precision, recall}], pr_avg, rc_avg, fitness}; undefined
// values become null.
nlohmann::json to_json(const EvalReport& report);

}  // namespace keysel
