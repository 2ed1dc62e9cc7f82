#pragma once

// Shared test fixtures and independent oracles. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/core.h>

namespace keysel::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            fmt::format("keysel_test_{}_{}_{}", ::getpid(), stamp, counter++);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reference tokenizer: regex over ASCII letter runs, lowercased.
inline std::vector<std::string> reference_tokens(const std::string& text) {
  static const std::regex word("[A-Za-z]+");
  std::vector<std::string> out;
  for (std::sregex_iterator it(text.begin(), text.end(), word), end; it != end; ++it) {
    std::string w = it->str();
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(w);
  }
  return out;
}

inline std::map<std::string, std::size_t> count_words(const std::vector<std::string>& tokens) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

// Precision/recall straight from label/prediction lists.
struct OracleScores {
  std::vector<std::optional<double>> precision;
  std::vector<std::optional<double>> recall;
  double pr_avg = 0.0;
  double rc_avg = 0.0;
};

inline OracleScores oracle_scores(const std::vector<std::size_t>& truth,
                                  const std::vector<std::size_t>& predicted,
                                  std::size_t n_categories) {
  OracleScores s;
  double pr_sum = 0, rc_sum = 0;
  int pr_n = 0, rc_n = 0;
  for (std::size_t c = 0; c < n_categories; ++c) {
    int tp = 0, pred = 0, actual = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == c) ++pred;
      if (truth[i] == c) ++actual;
      if (predicted[i] == c && truth[i] == c) ++tp;
    }
    s.precision.push_back(pred ? std::optional<double>(double(tp) / pred) : std::nullopt);
    s.recall.push_back(actual ? std::optional<double>(double(tp) / actual) : std::nullopt);
    if (pred) pr_sum += double(tp) / pred, ++pr_n;
    if (actual) rc_sum += double(tp) / actual, ++rc_n;
  }
  s.pr_avg = pr_sum / pr_n;
  s.rc_avg = rc_n ? rc_sum / rc_n : 0.0;
  return s;
}

// kNN by sorting every training point: distance, then self-match, then id.
inline std::size_t oracle_knn(const std::vector<std::vector<double>>& train,
                              const std::vector<std::string>& ids,
                              const std::vector<std::size_t>& labels,
                              const std::vector<double>& query, std::size_t k,
                              const std::string& query_id = {}) {
  struct Row {
    double d;
    int not_self;
    std::string id;
    std::size_t label;
  };
  std::vector<Row> rows;
  for (std::size_t j = 0; j < train.size(); ++j) {
    double acc = 0;
    for (std::size_t i = 0; i < query.size(); ++i) acc += std::pow(query[i] - train[j][i], 2);
    rows.push_back({std::sqrt(acc), ids[j] == query_id ? 0 : 1, ids[j], labels[j]});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.d, a.not_self, a.id) < std::tie(b.d, b.not_self, b.id);
  });
  std::map<std::size_t, int> votes;
  for (std::size_t i = 0; i < k; ++i) ++votes[rows[i].label];
  int top = 0;
  for (const auto& [label, v] : votes) top = std::max(top, v);
  for (std::size_t i = 0; i < k; ++i) {
    if (votes[rows[i].label] == top) return rows[i].label;
  }
  return SIZE_MAX;
}

}  // namespace keysel::testing
