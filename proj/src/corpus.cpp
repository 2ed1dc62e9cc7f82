#include "keysel/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include "json.hpp"

#include "keysel/error.hpp"
#include "keysel/random.hpp"

namespace keysel {
namespace fs = std::filesystem;

namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Returns the byte offset of the first malformed UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t min_cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    std::uint32_t cp = c & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error(fmt::format("cannot read file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw input_error(fmt::format("error while reading '{}'", path.string()));
  return std::move(ss).str();
}

}  // namespace

Encoding parse_encoding(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "utf-8" || lower == "utf8") return Encoding::kUtf8;
  if (lower == "latin1" || lower == "latin-1" || lower == "iso-8859-1") return Encoding::kLatin1;
  throw config_error(fmt::format("unknown encoding '{}' (expected utf-8 or latin1)", name));
}

std::vector<std::string> tokenize(std::string_view raw, Encoding encoding) {
  if (encoding == Encoding::kUtf8) {
    if (const auto bad = find_invalid_utf8(raw); bad != std::string_view::npos) {
      throw input_error(fmt::format("undecodable UTF-8 at byte offset {}", bad));
    }
  }
  // Non-ASCII bytes are never letters here, so a multi-byte code point acts as
  // a separator without further decoding.
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_ascii_alpha(c)) {
      current.push_back(static_cast<char>(c | 0x20));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Corpus::Corpus(std::vector<Category> categories, std::vector<Document> documents)
    : categories_(std::move(categories)), documents_(std::move(documents)) {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].index != i) throw internal_error("category indices must be dense");
  }
  std::sort(documents_.begin(), documents_.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& doc = documents_[i];
    if (doc.category >= categories_.size()) {
      throw internal_error(fmt::format("document '{}' has unknown category", doc.id));
    }
    if (!by_id_.emplace(doc.id, i).second) {
      throw input_error(fmt::format("duplicate document id '{}'", doc.id));
    }
  }
}

const Document* Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &documents_[it->second];
}

const Document& Corpus::at(std::string_view id) const {
  const auto* doc = find(id);
  if (doc == nullptr) throw input_error(fmt::format("unknown document id '{}'", id));
  return *doc;
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  out.reserve(documents_.size());
  for (const auto& d : documents_) out.push_back(d.id);
  return out;
}

Corpus load_corpus(const fs::path& root, const LoadOptions& options) {
  const auto warn = [&](const std::string& msg) {
    if (options.warn) {
      options.warn(msg);
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  };

  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw input_error(fmt::format("corpus root '{}' is missing or not a directory", root.string()));
  }

  std::map<std::string, std::vector<fs::path>> files_by_category;
  fs::directory_iterator it(root, ec);
  if (ec) throw input_error(fmt::format("cannot list corpus root '{}': {}", root.string(), ec.message()));
  for (const auto& entry : it) {
    const auto name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (!entry.is_directory()) {
      warn(fmt::format("ignoring non-directory '{}' in corpus root", name));
      continue;
    }
    auto& files = files_by_category[name];
    for (const auto& f : fs::directory_iterator(entry.path())) {
      const auto fname = f.path().filename().string();
      if (fname.empty() || fname.front() == '.' || !f.is_regular_file()) continue;
      files.push_back(f.path());
    }
  }
  if (files_by_category.empty()) {
    throw input_error(fmt::format("corpus root '{}' has no category subdirectories", root.string()));
  }

  std::vector<Category> categories;
  std::vector<Document> documents;
  for (auto& [name, files] : files_by_category) {
    if (files.empty()) throw input_error(fmt::format("category '{}' contains no files", name));
    const std::size_t index = categories.size();
    categories.push_back({name, index});
    std::sort(files.begin(), files.end());
    std::size_t kept = 0;
    for (const auto& path : files) {
      const auto id = fs::relative(path, root).generic_string();
      std::vector<std::string> tokens;
      try {
        tokens = tokenize(read_file(path), options.encoding);
      } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
      }
      if (tokens.empty()) {
        warn(fmt::format("document '{}' has no tokens and is excluded", id));
        continue;
      }
      documents.push_back({id, index, std::move(tokens)});
      ++kept;
    }
    if (kept == 0) throw input_error(fmt::format("category '{}' has no non-empty documents", name));
  }
  return Corpus(std::move(categories), std::move(documents));
}

void dump_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents()) {
    const nlohmann::json line = {{"id", doc.id},
                                 {"category", corpus.categories()[doc.category].name},
                                 {"token_count", doc.token_count()}};
    out << line.dump() << '\n';
  }
}

Split split_ids(const Corpus& corpus, std::span<const std::string> ids, std::size_t train_count,
                std::uint64_t seed) {
  if (train_count < 1 || train_count >= ids.size()) {
    throw config_error(fmt::format("train count {} must lie in [1, {})", train_count, ids.size()));
  }
  std::vector<std::string> pool(ids.begin(), ids.end());
  std::sort(pool.begin(), pool.end());
  if (std::adjacent_find(pool.begin(), pool.end()) != pool.end()) {
    throw input_error("split ids contain duplicates");
  }
  std::set<std::size_t> required;
  for (const auto& id : pool) required.insert(corpus.at(id).category);
  if (required.size() > train_count) {
    throw config_error(fmt::format("train count {} cannot cover {} categories", train_count,
                                   required.size()));
  }

  constexpr int kMaxAttempts = 1000;
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::string> order = pool;
    // Partial Fisher-Yates: the first train_count slots are the sample.
    for (std::size_t i = 0; i < train_count; ++i) {
      const auto j = i + rng.uniform_index(order.size() - i);
      std::swap(order[i], order[j]);
    }
    std::set<std::size_t> covered;
    for (std::size_t i = 0; i < train_count; ++i) covered.insert(corpus.at(order[i]).category);
    if (covered.size() != required.size()) continue;

    Split split;
    split.seed = seed;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
  }
  throw config_error(fmt::format(
      "could not draw a training sample of {} covering all {} categories after {} attempts",
      train_count, required.size(), kMaxAttempts));
}

}  // namespace keysel
