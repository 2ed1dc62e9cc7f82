#include "keysel/knn.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include <fmt/core.h>

#include "keysel/error.hpp"

namespace keysel {

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw input_error(fmt::format("vector length mismatch: {} vs {}", a.size(), b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::size_t classify(const FeatureMatrix& train, std::span<const double> query, const KnnConfig& cfg,
                     std::optional<std::string_view> query_id) {
  if (train.cols() == 0) throw input_error("kNN training set is empty");
  if (query.size() != train.rows()) {
    throw input_error(fmt::format("query has {} coordinates, training basis has {}", query.size(),
                                  train.rows()));
  }
  if (cfg.k == 0 || cfg.k > train.cols()) {
    throw config_error(fmt::format("k={} must lie in [1, {}]", cfg.k, train.cols()));
  }

  struct Neighbour {
    double distance;
    bool self;
    std::size_t col;
  };
  std::vector<Neighbour> all;
  all.reserve(train.cols());
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const bool self = query_id && train.doc_ids()[j] == *query_id;
    all.push_back({euclidean_distance(query, train.column(j)), self, j});
  }
  const auto& ids = train.doc_ids();
  const auto closer = [&](const Neighbour& a, const Neighbour& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.self != b.self) return a.self;
    return ids[a.col] < ids[b.col];
  };
  const auto k = static_cast<std::ptrdiff_t>(cfg.k);
  std::partial_sort(all.begin(), all.begin() + k, all.end(), closer);

  std::vector<std::size_t> votes(train.categories().size(), 0);
  for (std::ptrdiff_t i = 0; i < k; ++i) ++votes[train.labels()[all[i].col]];
  const auto best = *std::max_element(votes.begin(), votes.end());
  // The nearest neighbour belonging to any top-voted category decides.
  for (std::ptrdiff_t i = 0; i < k; ++i) {
    const auto label = train.labels()[all[i].col];
    if (votes[label] == best) return label;
  }
  throw internal_error("kNN vote produced no winner");
}

void ConfusionCounts::add(std::size_t truth, std::size_t predicted, std::size_t n) {
  if (truth >= n_ || predicted >= n_) throw internal_error("confusion category out of range");
  counts_[truth * n_ + predicted] += n;
}

std::size_t ConfusionCounts::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionCounts::predicted_as(std::size_t category) const {
  std::size_t sum = 0;
  for (std::size_t t = 0; t < n_; ++t) sum += at(t, category);
  return sum;
}

std::size_t ConfusionCounts::truly(std::size_t category) const {
  std::size_t sum = 0;
  for (std::size_t p = 0; p < n_; ++p) sum += at(category, p);
  return sum;
}

EvalReport report_from_counts(const ConfusionCounts& counts, std::span<const Category> categories) {
  if (categories.size() != counts.categories()) {
    throw internal_error("confusion counts and category list disagree");
  }
  EvalReport report;
  double pr_sum = 0.0;
  double rc_sum = 0.0;
  std::size_t pr_n = 0;
  std::size_t rc_n = 0;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    CategoryScore score{categories[c].name, std::nullopt, std::nullopt};
    const auto correct = static_cast<double>(counts.at(c, c));
    if (const auto predicted = counts.predicted_as(c); predicted > 0) {
      score.precision = correct / static_cast<double>(predicted);
      pr_sum += *score.precision;
      ++pr_n;
    }
    if (const auto truly = counts.truly(c); truly > 0) {
      score.recall = correct / static_cast<double>(truly);
      rc_sum += *score.recall;
      ++rc_n;
    }
    report.categories.push_back(std::move(score));
  }
  if (pr_n == 0) throw eval_error("no category has a defined precision (empty evaluation set)");
  report.pr_avg = pr_sum / static_cast<double>(pr_n);
  report.rc_avg = rc_n > 0 ? rc_sum / static_cast<double>(rc_n) : 0.0;
  report.fitness = fitness_from_report(report);
  return report;
}

double fitness_from_report(const EvalReport& report) {
  const bool any = std::any_of(report.categories.begin(), report.categories.end(),
                               [](const CategoryScore& s) { return s.precision.has_value(); });
  if (!any) throw eval_error("fitness undefined: no category has a defined precision");
  return 1.0 - report.pr_avg;
}

ConfusionCounts confusion(const FeatureMatrix& train, const FeatureMatrix& test,
                          const KnnConfig& cfg) {
  if (train.keywords() != test.keywords()) {
    throw input_error("training and test matrices use different keyword bases");
  }
  if (train.categories() != test.categories()) {
    throw input_error("training and test matrices use different category sets");
  }

  std::vector<std::size_t> predicted(test.cols());
  const auto classify_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      predicted[j] = classify(train, test.column(j), cfg, test.doc_ids()[j]);
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(test.cols(), 1));
  if (n_threads == 1) {
    classify_range(0, test.cols());
  } else {
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> workers;
    const std::size_t chunk = (test.cols() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = std::min(test.cols(), t * chunk);
      const std::size_t end = std::min(test.cols(), begin + chunk);
      workers.emplace_back([&, t, begin, end] {
        try {
          classify_range(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ConfusionCounts counts(test.categories().size());
  for (std::size_t j = 0; j < test.cols(); ++j) counts.add(test.labels()[j], predicted[j]);
  return counts;
}

EvalReport evaluate(const FeatureMatrix& train, const FeatureMatrix& test, const KnnConfig& cfg) {
  return report_from_counts(confusion(train, test, cfg), test.categories());
}

nlohmann::json to_json(const EvalReport& report) {
  const auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  auto categories = nlohmann::json::array();
  for (const auto& s : report.categories) {
    categories.push_back({{"name", s.name}, {"precision", opt(s.precision)}, {"recall", opt(s.recall)}});
  }
  return {{"categories", std::move(categories)},
          {"pr_avg", report.pr_avg},
          {"rc_avg", report.rc_avg},
          {"fitness", report.fitness}};
}

}  // namespace keysel
