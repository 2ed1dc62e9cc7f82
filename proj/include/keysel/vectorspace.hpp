#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "keysel/corpus.hpp"

namespace keysel {

// Relative frequency of `word` in the document: occurrences / token count.
double document_frequency(const Document& doc, std::string_view word);

// Keyword x document matrix of per-document relative keyword frequencies.
// Rows are keywords, columns are documents in sorted id order. Storage is
// column-contiguous so each document vector is a single span.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> keywords, std::vector<std::string> doc_ids,
                std::vector<std::size_t> labels, std::vector<Category> categories,
                std::vector<double> column_major_values);

  std::size_t rows() const { return keywords_.size(); }
  std::size_t cols() const { return doc_ids_.size(); }

  double value(std::size_t row, std::size_t col) const { return values_[col * rows() + row]; }
  std::span<const double> column(std::size_t col) const {
    return {values_.data() + col * rows(), rows()};
  }

  const std::vector<std::string>& keywords() const { return keywords_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  const std::vector<Category>& categories() const { return categories_; }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::vector<std::string> keywords_;
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> labels_;
  std::vector<Category> categories_;
  std::vector<double> values_;
};

FeatureMatrix build_feature_matrix(const Corpus& corpus, std::span<const std::string> doc_ids,
                                   std::span<const std::string> keywords);

// Row subset in the order given by `rows`; columns and labels are unchanged.
FeatureMatrix project(const FeatureMatrix& matrix, std::span<const std::size_t> rows);

// Header row of doc ids, first column of keywords.
void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& out);

}  // namespace keysel
