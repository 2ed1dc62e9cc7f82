#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace keysel {

enum class Encoding { kUtf8, kLatin1 };

Encoding parse_encoding(std::string_view name);

// Splits text into lowercase runs of ASCII letters. Every other byte or code
// point separates tokens, so "don't" yields {"don", "t"}. In UTF-8 mode the
// input is validated first and a malformed sequence raises an input error
// carrying its byte offset.
std::vector<std::string> tokenize(std::string_view raw, Encoding encoding = Encoding::kUtf8);

struct Category {
  std::string name;
  std::size_t index = 0;

  bool operator==(const Category&) const = default;
};

struct Document {
  std::string id;  // path relative to the corpus root, '/'-separated
  std::size_t category = 0;
  std::vector<std::string> tokens;

  std::size_t token_count() const { return tokens.size(); }
};

// Immutable labelled document collection. Documents are held sorted by id
// and categories are indexed in lexicographic order of their names.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Category> categories, std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<Category>& categories() const { return categories_; }
  std::size_t size() const { return documents_.size(); }

  // Null when the id is unknown.
  const Document* find(std::string_view id) const;
  const Document& at(std::string_view id) const;

  std::vector<std::string> ids() const;

 private:
  std::vector<Category> categories_;
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct LoadOptions {
  Encoding encoding = Encoding::kUtf8;
  // Receives non-fatal diagnostics such as files with no tokens.
  std::function<void(const std::string&)> warn;
};

// One subdirectory of `root` per category, one document per regular file.
// Dot-files are ignored.
Corpus load_corpus(const std::filesystem::path& root, const LoadOptions& options = {});

// Writes one JSON object per line: {"id", "category", "token_count"}.
void dump_corpus_jsonl(const Corpus& corpus, std::ostream& out);

struct Split {
  std::vector<std::string> train;  // sorted
  std::vector<std::string> test;   // sorted
  std::uint64_t seed = 0;
};

// Samples `train_count` of `ids` uniformly without replacement. The sample is
// redrawn (bounded number of attempts) until every category present among
// the ids appears in the training part.
Split split_ids(const Corpus& corpus, std::span<const std::string> ids, std::size_t train_count,
                std::uint64_t seed);

inline Split split_corpus(const Corpus& corpus, std::size_t train_count, std::uint64_t seed) {
  const auto ids = corpus.ids();
  return split_ids(corpus, ids, train_count, seed);
}

}  // namespace keysel
