// keysel: genetic keyword-subset selection for kNN authorship attribution.
//
//   keysel run    full pipeline (corpus -> dictionary -> pool -> GA -> reports)
//   keysel dict   export the frequency dictionary and keyword pool
//   keysel eval   score a given keyword list without running the GA
//   keysel synth  write a planted-marker synthetic corpus
//   keysel oracle exhaustive search over a small pool
//
// Every subcommand accepts --config FILE, a flat "key = value" file whose keys
// are long flag names without the leading dashes. Flags given on the command
// line override values from the file.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "keysel/error.hpp"
#include "keysel/runner.hpp"
#include "keysel/synth.hpp"

namespace {

using namespace keysel;

struct Options {
  std::string corpus;
  std::string encoding = "utf-8";
  std::size_t train_count = 0;
  std::uint64_t seed = 0;
  double p_min = 0.0;
  double p_max = 1e-3;
  std::size_t max_words = 1000;
  std::string dict_scope = "train";
  std::size_t k = 1;
  std::size_t pop_size = 50;
  std::size_t chromosome_size = 30;
  std::size_t elites = 5;
  double crossover_fraction = 0.8;
  double mutation_rate = 0.0;  // 0 selects 1 / chromosome size
  std::size_t max_generations = 0;
  std::size_t stall_generations = 0;
  double target_fitness = 0.0;
  std::string eval_split = "test";
  double validation_fraction = 0.25;
  std::string output;
  std::size_t threads = 1;
  std::size_t repeat = 1;
  std::string words;
  std::string words_file;
  std::uint64_t cap = 1'000'000;
  std::string config;

  SynthConfig synth;
};

void add_corpus_options(CLI::App* app, Options& o) {
  app->add_option("--corpus", o.corpus, "Corpus root: one subdirectory per author")->required();
  app->add_option("--encoding", o.encoding, "Text encoding: utf-8 or latin1");
  app->add_option("--train-count", o.train_count, "Number of training documents")->required();
  app->add_option("--seed", o.seed, "Master random seed");
}

void add_pool_options(CLI::App* app, Options& o) {
  app->add_option("--p-min", o.p_min, "Lower frequency bound of the keyword pool (inclusive)");
  app->add_option("--p-max", o.p_max, "Upper frequency bound of the keyword pool (exclusive)");
  app->add_option("--max-words", o.max_words, "Keep at most this many pool words");
  app->add_option("--dict-scope", o.dict_scope, "Documents behind the dictionary: train or corpus");
}

void add_eval_options(CLI::App* app, Options& o) {
  app->add_option("--k", o.k, "Neighbours consulted by the kNN classifier");
  app->add_option("--eval-split", o.eval_split,
                  "Where fitness is measured: test, or validation (carved from train)");
  app->add_option("--validation-fraction", o.validation_fraction,
                  "Share of the training split held out in validation mode");
  app->add_option("--threads", o.threads, "Worker threads for fitness evaluation");
}

void add_ga_options(CLI::App* app, Options& o) {
  app->add_option("--pop-size", o.pop_size, "Chromosomes per generation");
  app->add_option("--chromosome-size", o.chromosome_size, "Keywords per chromosome");
  app->add_option("--elites", o.elites, "Elite chromosomes copied unchanged");
  app->add_option("--crossover-fraction", o.crossover_fraction,
                  "Share of non-elite offspring produced by crossover");
  app->add_option("--mutation-rate", o.mutation_rate, "Per-gene mutation probability (default 1/size)");
  app->add_option("--max-generations", o.max_generations, "Generation budget")->required();
  app->add_option("--stall-generations", o.stall_generations,
                  "Stop after this many generations without improvement (0 = never)");
  app->add_option("--target-fitness", o.target_fitness, "Stop once the best fitness is at or below");
}

RunConfig to_run_config(const Options& o) {
  RunConfig cfg;
  cfg.corpus_root = o.corpus;
  cfg.encoding = parse_encoding(o.encoding);
  cfg.train_count = o.train_count;
  cfg.seed = o.seed;
  cfg.pool = {o.p_min, o.p_max, o.max_words};
  cfg.dict_scope = parse_dict_scope(o.dict_scope);
  cfg.knn.k = o.k;
  cfg.ga.pop_size = o.pop_size;
  cfg.ga.chromosome_size = o.chromosome_size;
  cfg.ga.elite_count = o.elites;
  cfg.ga.crossover_fraction = o.crossover_fraction;
  if (o.mutation_rate > 0.0) cfg.ga.mutation_rate = o.mutation_rate;
  cfg.ga.max_generations = o.max_generations;
  cfg.ga.stall_generations = o.stall_generations;
  cfg.ga.target_fitness = o.target_fitness;
  cfg.eval_split = parse_eval_split(o.eval_split);
  cfg.validation_fraction = o.validation_fraction;
  cfg.output_dir = o.output;
  cfg.threads = o.threads;
  return cfg;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    if (c == ',' || c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Reads "key = value" lines into "--key=value" arguments.
std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error(fmt::format("cannot read config file '{}'", path));
  std::vector<std::string> args;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(fmt::format("{}:{}: expected 'key = value'", path, lineno));
    }
    args.push_back(fmt::format("--{}={}", trim(line.substr(0, eq)), trim(line.substr(eq + 1))));
  }
  return args;
}

int fail(const Error& e) {
  std::cerr << fmt::format("keysel: error kind={} code={}: {}\n", kind_name(e.kind()),
                           exit_code(e.kind()), e.what());
  return exit_code(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Genetic keyword-subset selection for kNN authorship attribution", "keysel"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline and write reports");
  add_corpus_options(run_cmd, o);
  add_pool_options(run_cmd, o);
  add_eval_options(run_cmd, o);
  add_ga_options(run_cmd, o);
  run_cmd->add_option("--output", o.output, "Output directory")->required();
  run_cmd->add_option("--repeat", o.repeat, "Repeat with consecutive seeds and summarise");

  auto* dict_cmd = app.add_subcommand("dict", "Export the frequency dictionary and keyword pool");
  add_corpus_options(dict_cmd, o);
  add_pool_options(dict_cmd, o);
  dict_cmd->add_option("--output", o.output, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score a keyword list on the test split");
  add_corpus_options(eval_cmd, o);
  eval_cmd->add_option("--k", o.k, "Neighbours consulted by the kNN classifier");
  eval_cmd->add_option("--words", o.words, "Comma-separated keywords");
  eval_cmd->add_option("--words-file", o.words_file, "File of keywords, whitespace separated");
  eval_cmd->add_option("--output", o.output, "Optional output directory for report.json");

  auto* synth_cmd = app.add_subcommand("synth", "Write a planted-marker synthetic corpus");
  synth_cmd->add_option("--output", o.output, "Destination directory")->required();
  synth_cmd->add_option("--authors", o.synth.n_authors, "Number of authors");
  synth_cmd->add_option("--docs", o.synth.docs_per_author, "Documents per author");
  synth_cmd->add_option("--tokens", o.synth.tokens_per_doc, "Tokens per document");
  synth_cmd->add_option("--markers", o.synth.marker_words_per_author, "Marker words per author");
  synth_cmd->add_option("--vocabulary", o.synth.vocabulary_size, "Background vocabulary size");
  synth_cmd->add_option("--marker-rate", o.synth.marker_rate, "Marker rate in the owner's text");
  synth_cmd->add_option("--marker-base-rate", o.synth.marker_base_rate, "Marker rate elsewhere");
  synth_cmd->add_option("--seed", o.synth.seed, "Random seed");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive best subset over a small pool");
  add_corpus_options(oracle_cmd, o);
  add_pool_options(oracle_cmd, o);
  oracle_cmd->add_option("--k", o.k, "Neighbours consulted by the kNN classifier");
  oracle_cmd->add_option("--eval-split", o.eval_split, "test or validation");
  oracle_cmd->add_option("--chromosome-size", o.chromosome_size, "Subset size")->required();
  oracle_cmd->add_option("--cap", o.cap, "Maximum number of subsets to enumerate");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->add_option("--config", o.config, "Flat key = value file of default flag values");
    for (auto* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  // Values from --config are spliced in right after the subcommand name so
  // that explicit flags, which come later, take precedence.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config") path = args[i + 1];
      if (path.empty()) continue;
      auto extra = config_file_args(path);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
    for (const auto& a : args) {
      if (a.rfind("--config=", 0) == 0) {
        auto extra = config_file_args(a.substr(9));
        args.insert(args.begin() + 1, extra.begin(), extra.end());
        break;
      }
    }
  } catch (const Error& e) {
    return fail(e);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : exit_code(ErrorKind::kConfig);
  }

  try {
    if (*run_cmd) {
      const auto cfg = to_run_config(o);
      if (o.repeat > 1) {
        const auto summary = run_repeated(cfg, o.repeat);
        std::cout << summary.dump(2) << '\n';
      } else {
        const auto report = run(cfg);
        std::cout << fmt::format("best fitness {} after {} generations ({})\n", report.best.fitness,
                                 report.evolution.trace.size(),
                                 stop_reason_name(report.evolution.stop_reason));
        std::cout << fmt::format("test precision {} recall {}\n", report.test_report.pr_avg,
                                 report.test_report.rc_avg);
        std::cout << "keywords:";
        for (const auto& w : report.words) std::cout << ' ' << w;
        std::cout << '\n';
      }
    } else if (*dict_cmd) {
      auto cfg = to_run_config(o);
      cfg.ga.max_generations = 1;
      const auto p = prepare_pipeline(cfg);
      std::filesystem::create_directories(o.output);
      std::ofstream dict_out(std::filesystem::path(o.output) / "dictionary.csv");
      write_dictionary_csv(p.dictionary, dict_out);
      std::ofstream pool_out(std::filesystem::path(o.output) / "pool.csv");
      write_pool_csv(p.pool, pool_out);
      if (!dict_out || !pool_out) throw io_error("failed writing dictionary or pool CSV");
      std::cout << fmt::format("{} dictionary words, {} pool words in [{}, {}]\n",
                               p.dictionary.entries.size(), p.pool.size(),
                               p.pool.frequencies.back(), p.pool.frequencies.front());
    } else if (*eval_cmd) {
      std::string text = o.words;
      if (!o.words_file.empty()) {
        std::ifstream in(o.words_file);
        if (!in) throw input_error(fmt::format("cannot read words file '{}'", o.words_file));
        std::stringstream ss;
        ss << in.rdbuf();
        text += ' ' + ss.str();
      }
      const auto words = split_words(text);
      if (words.empty()) throw config_error("eval needs --words or --words-file");
      auto cfg = to_run_config(o);
      cfg.ga.max_generations = 1;
      LoadOptions lo;
      lo.encoding = cfg.encoding;
      const auto corpus = load_corpus(cfg.corpus_root, lo);
      const auto split = split_corpus(corpus, cfg.train_count, cfg.seed);
      const auto train = build_feature_matrix(corpus, split.train, words);
      const auto test = build_feature_matrix(corpus, split.test, words);
      const auto report = to_json(evaluate(train, test, cfg.knn));
      if (!o.output.empty()) {
        std::filesystem::create_directories(o.output);
        std::ofstream out(std::filesystem::path(o.output) / "report.json");
        out << report.dump(2) << '\n';
        if (!out) throw io_error("failed writing report.json");
      }
      std::cout << report.dump(2) << '\n';
    } else if (*synth_cmd) {
      const auto manifest = make_synthetic_corpus(o.synth, o.output);
      std::cout << fmt::format("wrote {} documents by {} authors to {}/corpus\n",
                               manifest.documents.size(), manifest.authors.size(), o.output);
    } else if (*oracle_cmd) {
      auto cfg = to_run_config(o);
      cfg.ga.max_generations = 1;
      const auto p = prepare_pipeline(cfg);
      const auto best = exhaustive_best(p.pool.size(), o.chromosome_size,
                                        make_fitness(p.fit_train, p.fit_eval, cfg.knn), o.cap);
      const nlohmann::json out = {
          {"fitness", best.fitness},
          {"indices", std::vector<std::size_t>(best.chromosome.genes().begin(),
                                               best.chromosome.genes().end())},
          {"words", report_words(p.pool, best.chromosome)}};
      std::cout << out.dump(2) << '\n';
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(internal_error(e.what()));
  }
  return 0;
}
