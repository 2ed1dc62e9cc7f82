#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "keysel/corpus.hpp"

namespace keysel {

struct DictionaryEntry {
  std::string word;
  std::size_t count = 0;
  double frequency = 0.0;  // count / total tokens of the building document set
};

// Word frequencies over a document set, sorted by frequency descending with
// ties broken lexicographically.
struct FrequencyDictionary {
  std::vector<DictionaryEntry> entries;
  std::size_t total_tokens = 0;
};

FrequencyDictionary build_frequency_dictionary(const Corpus& corpus,
                                               std::span<const std::string> doc_ids);

// Half-open frequency band [p_min, p_max) plus a cap on the number of words.
struct PoolConfig {
  double p_min = 0.0;
  double p_max = 1e-3;
  std::size_t max_words = 1000;

  void validate() const;
};

// The gene pool: the highest-frequency dictionary words inside the band.
struct KeywordPool {
  std::vector<std::string> words;
  std::vector<double> frequencies;

  std::size_t size() const { return words.size(); }
};

KeywordPool select_pool(const FrequencyDictionary& dict, const PoolConfig& cfg);

// CSV exports: "word,count,frequency" and "rank,word,frequency".
void write_dictionary_csv(const FrequencyDictionary& dict, std::ostream& out);
void write_pool_csv(const KeywordPool& pool, std::ostream& out);

}  // namespace keysel
