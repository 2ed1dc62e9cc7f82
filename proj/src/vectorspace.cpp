#include "keysel/vectorspace.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include <fmt/core.h>

#include "keysel/error.hpp"

namespace keysel {

double document_frequency(const Document& doc, std::string_view word) {
  if (doc.token_count() == 0) throw input_error(fmt::format("document '{}' is empty", doc.id));
  const auto n = std::count(doc.tokens.begin(), doc.tokens.end(), word);
  return static_cast<double>(n) / static_cast<double>(doc.token_count());
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> keywords, std::vector<std::string> doc_ids,
                             std::vector<std::size_t> labels, std::vector<Category> categories,
                             std::vector<double> column_major_values)
    : keywords_(std::move(keywords)),
      doc_ids_(std::move(doc_ids)),
      labels_(std::move(labels)),
      categories_(std::move(categories)),
      values_(std::move(column_major_values)) {
  if (labels_.size() != doc_ids_.size() || values_.size() != keywords_.size() * doc_ids_.size()) {
    throw internal_error("feature matrix dimensions disagree");
  }
}

FeatureMatrix build_feature_matrix(const Corpus& corpus, std::span<const std::string> doc_ids,
                                   std::span<const std::string> keywords) {
  if (keywords.empty()) throw input_error("feature matrix needs at least one keyword");
  if (doc_ids.empty()) throw input_error("feature matrix needs at least one document");

  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t k = 0; k < keywords.size(); ++k) {
    if (!row_of.emplace(keywords[k], k).second) {
      throw input_error(fmt::format("duplicate keyword '{}'", keywords[k]));
    }
  }

  std::vector<std::string> ids(doc_ids.begin(), doc_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw input_error("feature matrix doc ids contain duplicates");
  }

  const std::size_t n_rows = keywords.size();
  std::vector<double> values(n_rows * ids.size(), 0.0);
  std::vector<std::size_t> labels;
  labels.reserve(ids.size());
  std::vector<std::size_t> counts(n_rows);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const Document& doc = corpus.at(ids[j]);
    if (doc.token_count() == 0) throw input_error(fmt::format("document '{}' is empty", doc.id));
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& token : doc.tokens) {
      if (const auto it = row_of.find(token); it != row_of.end()) ++counts[it->second];
    }
    const auto len = static_cast<double>(doc.token_count());
    for (std::size_t k = 0; k < n_rows; ++k) {
      values[j * n_rows + k] = static_cast<double>(counts[k]) / len;
    }
    labels.push_back(doc.category);
  }
  return FeatureMatrix({keywords.begin(), keywords.end()}, std::move(ids), std::move(labels),
                       corpus.categories(), std::move(values));
}

FeatureMatrix project(const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
  std::vector<bool> seen(matrix.rows(), false);
  std::vector<std::string> keywords;
  keywords.reserve(rows.size());
  for (const auto r : rows) {
    if (r >= matrix.rows()) {
      throw input_error(fmt::format("projection index {} out of range [0, {})", r, matrix.rows()));
    }
    if (seen[r]) throw input_error(fmt::format("duplicate projection index {}", r));
    seen[r] = true;
    keywords.push_back(matrix.keywords()[r]);
  }
  std::vector<double> values;
  values.reserve(rows.size() * matrix.cols());
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    const auto col = matrix.column(j);
    for (const auto r : rows) values.push_back(col[r]);
  }
  return FeatureMatrix(std::move(keywords), matrix.doc_ids(), matrix.labels(),
                       matrix.categories(), std::move(values));
}

void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& out) {
  out << "keyword";
  for (const auto& id : matrix.doc_ids()) out << ',' << id;
  out << '\n';
  for (std::size_t k = 0; k < matrix.rows(); ++k) {
    out << matrix.keywords()[k];
    for (std::size_t j = 0; j < matrix.cols(); ++j) out << fmt::format(",{}", matrix.value(k, j));
    out << '\n';
  }
}

}  // namespace keysel
