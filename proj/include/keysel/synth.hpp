#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace keysel {

// Planted-marker corpus: every author writes from the same Zipf background
// vocabulary, and each author additionally uses a few private marker words
// at an elevated rate. Markers also occur at `marker_base_rate` in every
// other author's text, so no single marker separates authors perfectly.
struct SynthConfig {
  std::size_t n_authors = 6;
  std::size_t docs_per_author = 10;
  std::size_t tokens_per_doc = 500;
  std::size_t marker_words_per_author = 3;
  std::size_t vocabulary_size = 2000;
  double zipf_exponent = 1.0;
  double marker_rate = 0.012;       // per marker, per token, in the owner's documents
  double marker_base_rate = 0.004;  // per marker, per token, elsewhere
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthDocument {
  std::string id;  // "<author>/<file>", relative to the corpus root
  std::string author;
  std::size_t token_count = 0;
};

struct SynthManifest {
  std::vector<std::string> authors;
  std::map<std::string, std::vector<std::string>> markers;  // author -> marker words
  std::vector<SynthDocument> documents;
  std::map<std::string, std::size_t> word_counts;           // over all documents

  std::vector<std::string> all_markers() const;
};

nlohmann::json to_json(const SynthManifest& manifest);
SynthManifest manifest_from_json(const nlohmann::json& j);

// Writes <dir>/corpus/<author>/<doc>.txt and <dir>/manifest.json. Returns the
// manifest; the corpus root is <dir>/corpus.
SynthManifest make_synthetic_corpus(const SynthConfig& cfg, const std::filesystem::path& dir);

}  // namespace keysel
