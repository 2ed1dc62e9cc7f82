#include "keysel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/core.h>

#include "keysel/error.hpp"
#include "keysel/random.hpp"

namespace keysel {
namespace fs = std::filesystem;

void SynthConfig::validate() const {
  if (n_authors == 0 || docs_per_author == 0 || tokens_per_doc == 0 ||
      marker_words_per_author == 0 || vocabulary_size == 0) {
    throw config_error("synthetic corpus parameters must all be at least 1");
  }
  const double marker_mass =
      static_cast<double>(marker_words_per_author) *
      (marker_rate + static_cast<double>(n_authors - 1) * marker_base_rate);
  if (marker_rate < 0.0 || marker_base_rate < 0.0 || marker_mass >= 1.0) {
    throw config_error("marker rates must be nonnegative and leave room for background words");
  }
  if (!(zipf_exponent >= 0.0)) throw config_error("zipf exponent must be nonnegative");
}

std::vector<std::string> SynthManifest::all_markers() const {
  std::vector<std::string> out;
  for (const auto& [author, words] : markers) out.insert(out.end(), words.begin(), words.end());
  return out;
}

nlohmann::json to_json(const SynthManifest& m) {
  auto docs = nlohmann::json::array();
  for (const auto& d : m.documents) {
    docs.push_back({{"id", d.id}, {"author", d.author}, {"token_count", d.token_count}});
  }
  return {{"authors", m.authors},
          {"markers", m.markers},
          {"documents", std::move(docs)},
          {"word_counts", m.word_counts}};
}

SynthManifest manifest_from_json(const nlohmann::json& j) {
  SynthManifest m;
  m.authors = j.at("authors").get<std::vector<std::string>>();
  m.markers = j.at("markers").get<std::map<std::string, std::vector<std::string>>>();
  for (const auto& d : j.at("documents")) {
    m.documents.push_back({d.at("id").get<std::string>(), d.at("author").get<std::string>(),
                           d.at("token_count").get<std::size_t>()});
  }
  m.word_counts = j.at("word_counts").get<std::map<std::string, std::size_t>>();
  return m;
}

namespace {

std::string make_word(RandomSource& rng) {
  static constexpr std::string_view kConsonants = "bcdfghklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  const auto syllables = 2 + rng.uniform_index(2);
  std::string w;
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w.push_back(kConsonants[rng.uniform_index(kConsonants.size())]);
    w.push_back(kVowels[rng.uniform_index(kVowels.size())]);
  }
  return w;
}

// Categorical sampler over a fixed weight vector (inverse CDF lookup).
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& weights) {
    cumulative_.reserve(weights.size());
    double acc = 0.0;
    for (const double w : weights) cumulative_.push_back(acc += w);
  }

  std::size_t draw(RandomSource& rng) const {
    const double u = rng.uniform_unit() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

SynthManifest make_synthetic_corpus(const SynthConfig& cfg, const fs::path& dir) {
  cfg.validate();
  Rng words_rng(derive_seed(cfg.seed, 0));
  Rng text_rng(derive_seed(cfg.seed, 1));

  const std::size_t n_markers = cfg.n_authors * cfg.marker_words_per_author;
  std::set<std::string> seen;
  std::vector<std::string> lexicon;  // markers first, then background
  while (lexicon.size() < n_markers + cfg.vocabulary_size) {
    auto w = make_word(words_rng);
    if (seen.insert(w).second) lexicon.push_back(std::move(w));
  }

  SynthManifest manifest;
  for (std::size_t a = 0; a < cfg.n_authors; ++a) {
    const auto name = fmt::format("author_{:02}", a);
    manifest.authors.push_back(name);
    auto& mk = manifest.markers[name];
    for (std::size_t m = 0; m < cfg.marker_words_per_author; ++m) {
      mk.push_back(lexicon[a * cfg.marker_words_per_author + m]);
    }
  }

  std::vector<double> background(cfg.vocabulary_size);
  double background_total = 0.0;
  for (std::size_t r = 0; r < cfg.vocabulary_size; ++r) {
    background[r] = 1.0 / std::pow(static_cast<double>(r + 1), cfg.zipf_exponent);
    background_total += background[r];
  }

  std::error_code ec;
  fs::create_directories(dir / "corpus", ec);
  if (ec) throw io_error(fmt::format("cannot create '{}': {}", (dir / "corpus").string(), ec.message()));

  for (std::size_t a = 0; a < cfg.n_authors; ++a) {
    std::vector<double> weights(lexicon.size());
    double marker_mass = 0.0;
    for (std::size_t i = 0; i < n_markers; ++i) {
      weights[i] = (i / cfg.marker_words_per_author == a) ? cfg.marker_rate : cfg.marker_base_rate;
      marker_mass += weights[i];
    }
    for (std::size_t r = 0; r < cfg.vocabulary_size; ++r) {
      weights[n_markers + r] = (1.0 - marker_mass) * background[r] / background_total;
    }
    const Categorical sampler(weights);

    const auto& author = manifest.authors[a];
    const auto author_dir = dir / "corpus" / author;
    fs::create_directories(author_dir, ec);
    if (ec) throw io_error(fmt::format("cannot create '{}': {}", author_dir.string(), ec.message()));

    for (std::size_t d = 0; d < cfg.docs_per_author; ++d) {
      const auto file = fmt::format("doc_{:03}.txt", d);
      std::string text;
      std::size_t in_sentence = 0;
      std::size_t sentence_len = 5 + text_rng.uniform_index(11);
      for (std::size_t t = 0; t < cfg.tokens_per_doc; ++t) {
        std::string word = lexicon[sampler.draw(text_rng)];
        ++manifest.word_counts[word];
        if (in_sentence == 0) {
          word[0] = static_cast<char>(word[0] - 'a' + 'A');
        } else {
          text += text_rng.bernoulli(0.1) ? ", " : " ";
        }
        text += word;
        if (++in_sentence == sentence_len || t + 1 == cfg.tokens_per_doc) {
          text += text_rng.bernoulli(0.2) ? ".\n" : ". ";
          in_sentence = 0;
          sentence_len = 5 + text_rng.uniform_index(11);
        }
      }
      std::ofstream out(author_dir / file, std::ios::binary);
      out << text;
      if (!out) throw io_error(fmt::format("cannot write '{}'", (author_dir / file).string()));
      manifest.documents.push_back({author + "/" + file, author, cfg.tokens_per_doc});
    }
  }

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << to_json(manifest).dump(2) << '\n';
  if (!out) throw io_error(fmt::format("cannot write '{}'", (dir / "manifest.json").string()));
  return manifest;
}

}  // namespace keysel
