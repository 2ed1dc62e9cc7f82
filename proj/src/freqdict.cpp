#include "keysel/freqdict.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include <fmt/core.h>

#include "keysel/error.hpp"

namespace keysel {

FrequencyDictionary build_frequency_dictionary(const Corpus& corpus,
                                               std::span<const std::string> doc_ids) {
  if (doc_ids.empty()) throw input_error("frequency dictionary needs at least one document");

  std::unordered_map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& id : doc_ids) {
    for (const auto& token : corpus.at(id).tokens) ++counts[token];
    total += corpus.at(id).token_count();
  }
  if (total == 0) throw input_error("frequency dictionary documents contain no tokens");

  FrequencyDictionary dict;
  dict.total_tokens = total;
  dict.entries.reserve(counts.size());
  for (auto& [word, count] : counts) {
    dict.entries.push_back(
        {word, count, static_cast<double>(count) / static_cast<double>(total)});
  }
  // Sorting on the integer count gives the same order as frequency, exactly.
  std::sort(dict.entries.begin(), dict.entries.end(),
            [](const DictionaryEntry& a, const DictionaryEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.word < b.word;
            });
  return dict;
}

void PoolConfig::validate() const {
  if (!(p_min >= 0.0) || !(p_max > p_min) || !(p_max <= 1.0)) {
    throw config_error(
        fmt::format("pool bounds must satisfy 0 <= p_min < p_max <= 1 (got [{}, {}))", p_min, p_max));
  }
  if (max_words == 0) throw config_error("pool max_words must be positive");
}

KeywordPool select_pool(const FrequencyDictionary& dict, const PoolConfig& cfg) {
  cfg.validate();
  if (dict.entries.empty()) throw input_error("frequency dictionary is empty");

  KeywordPool pool;
  for (const auto& e : dict.entries) {
    if (pool.size() == cfg.max_words) break;
    if (e.frequency >= cfg.p_min && e.frequency < cfg.p_max) {
      pool.words.push_back(e.word);
      pool.frequencies.push_back(e.frequency);
    }
  }
  if (pool.words.empty()) {
    throw config_error(fmt::format(
        "no dictionary word has frequency in [{}, {}); observed range is [{}, {}]", cfg.p_min,
        cfg.p_max, dict.entries.back().frequency, dict.entries.front().frequency));
  }
  return pool;
}

void write_dictionary_csv(const FrequencyDictionary& dict, std::ostream& out) {
  out << "word,count,frequency\n";
  for (const auto& e : dict.entries) out << fmt::format("{},{},{}\n", e.word, e.count, e.frequency);
}

void write_pool_csv(const KeywordPool& pool, std::ostream& out) {
  out << "rank,word,frequency\n";
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out << fmt::format("{},{},{}\n", i, pool.words[i], pool.frequencies[i]);
  }
}

}  // namespace keysel
