#include "keysel/ga.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/core.h>

#include "keysel/error.hpp"

namespace keysel {

Chromosome::Chromosome(std::vector<std::size_t> genes) : genes_(std::move(genes)) {
  std::sort(genes_.begin(), genes_.end());
  if (const auto dup = std::adjacent_find(genes_.begin(), genes_.end()); dup != genes_.end()) {
    throw input_error(fmt::format("chromosome repeats gene {}", *dup));
  }
}

bool Chromosome::contains(std::size_t gene) const {
  return std::binary_search(genes_.begin(), genes_.end(), gene);
}

double GaConfig::effective_mutation_rate() const {
  return mutation_rate ? *mutation_rate : 1.0 / static_cast<double>(chromosome_size);
}

void GaConfig::validate(std::size_t pool_size) const {
  if (pop_size == 0) throw config_error("population size must be positive");
  if (chromosome_size == 0) throw config_error("chromosome size must be positive");
  if (chromosome_size > pool_size) {
    throw config_error(
        fmt::format("chromosome size {} exceeds pool size {}", chromosome_size, pool_size));
  }
  if (elite_count >= pop_size) {
    throw config_error(fmt::format("elite count {} must be below population size {}", elite_count,
                                   pop_size));
  }
  if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
    throw config_error(fmt::format("crossover fraction {} outside [0, 1]", crossover_fraction));
  }
  const double rate = effective_mutation_rate();
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw config_error(fmt::format("mutation rate {} outside (0, 1]", rate));
  }
  if (max_generations == 0) throw config_error("max_generations must be set to a positive value");
  if (std::isnan(target_fitness)) throw config_error("target fitness is NaN");
}

namespace {

// Draws `count` distinct values from `candidates` (consumed in place).
void draw_without_replacement(std::vector<std::size_t>& candidates, std::size_t count,
                              RandomSource& rng, std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + rng.uniform_index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    out.push_back(candidates[i]);
  }
}

std::vector<std::size_t> unused_indices(std::span<const std::size_t> used, std::size_t pool_size) {
  std::vector<bool> taken(pool_size, false);
  for (const auto g : used) taken[g] = true;
  std::vector<std::size_t> out;
  out.reserve(pool_size - used.size());
  for (std::size_t i = 0; i < pool_size; ++i) {
    if (!taken[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<Chromosome> init_population(std::size_t pool_size, const GaConfig& cfg,
                                        RandomSource& rng) {
  if (cfg.chromosome_size > pool_size) {
    throw config_error(
        fmt::format("chromosome size {} exceeds pool size {}", cfg.chromosome_size, pool_size));
  }
  std::vector<Chromosome> population;
  population.reserve(cfg.pop_size);
  std::vector<std::size_t> all(pool_size);
  for (std::size_t m = 0; m < cfg.pop_size; ++m) {
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> genes;
    genes.reserve(cfg.chromosome_size);
    draw_without_replacement(all, cfg.chromosome_size, rng, genes);
    population.emplace_back(std::move(genes));
  }
  return population;
}

std::size_t select_parent_index(std::span<const ScoredChromosome> population, RandomSource& rng) {
  if (population.empty()) throw internal_error("selection from an empty population");
  const auto first = rng.uniform_index(population.size());
  const auto second = rng.uniform_index(population.size());
  return population[second].fitness < population[first].fitness ? second : first;
}

std::vector<std::size_t> apply_crossover_mask(const Chromosome& a, const Chromosome& b,
                                              const std::vector<bool>& mask) {
  if (a.size() != b.size() || mask.size() != a.size()) {
    throw input_error(fmt::format("crossover length mismatch: {}, {} and mask {}", a.size(),
                                  b.size(), mask.size()));
  }
  std::vector<std::size_t> child(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) child[i] = mask[i] ? a.genes()[i] : b.genes()[i];
  return child;
}

Chromosome repair(std::span<const std::size_t> genes, std::size_t target_size,
                  std::size_t pool_size, RandomSource& rng) {
  if (target_size > pool_size) {
    throw config_error(fmt::format("cannot fit {} distinct genes in a pool of {}", target_size,
                                   pool_size));
  }
  std::vector<bool> seen(pool_size, false);
  std::vector<std::size_t> kept;
  kept.reserve(target_size);
  for (const auto g : genes) {
    if (g >= pool_size) throw input_error(fmt::format("gene {} outside pool of {}", g, pool_size));
    if (seen[g]) continue;
    seen[g] = true;
    kept.push_back(g);
  }
  if (kept.size() > target_size) throw internal_error("repair input longer than target size");
  if (kept.size() < target_size) {
    auto free = unused_indices(kept, pool_size);
    draw_without_replacement(free, target_size - kept.size(), rng, kept);
  }
  return Chromosome(std::move(kept));
}

Chromosome scattered_crossover(const Chromosome& a, const Chromosome& b, std::size_t pool_size,
                               RandomSource& rng) {
  if (a.size() != b.size()) {
    throw input_error(fmt::format("crossover parents differ in length: {} vs {}", a.size(), b.size()));
  }
  std::vector<bool> mask(a.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(0.5);
  const auto child = apply_crossover_mask(a, b, mask);
  return repair(child, a.size(), pool_size, rng);
}

Chromosome mutate(const Chromosome& c, std::size_t pool_size, double rate, RandomSource& rng) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw config_error(fmt::format("mutation rate {} outside (0, 1]", rate));
  }
  if (c.size() >= pool_size) return c;

  std::vector<std::size_t> genes(c.genes().begin(), c.genes().end());
  std::vector<bool> taken(pool_size, false);
  for (const auto g : genes) taken[g] = true;
  const std::size_t n_free = pool_size - genes.size();
  for (auto& gene : genes) {
    if (!rng.bernoulli(rate)) continue;
    // The r-th index not currently in the chromosome.
    auto r = rng.uniform_index(n_free);
    std::size_t pick = 0;
    for (;; ++pick) {
      if (!taken[pick] && r-- == 0) break;
    }
    taken[gene] = false;
    taken[pick] = true;
    gene = pick;
  }
  return Chromosome(std::move(genes));
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxGenerations:
      return "max_generations";
    case StopReason::kStall:
      return "stall";
    case StopReason::kTarget:
      return "target";
  }
  return "unknown";
}

namespace {

bool ranks_before(const ScoredChromosome& a, const ScoredChromosome& b) {
  if (a.fitness != b.fitness) return a.fitness < b.fitness;
  return a.chromosome < b.chromosome;
}

// Scores `members` in place. Chromosomes already in `cache` are not
// re-evaluated; the fitness function is required to be deterministic.
void score_generation(std::vector<ScoredChromosome>& members, const FitnessFn& fitness_fn,
                      std::size_t threads, std::size_t generation,
                      std::map<Chromosome, double>& cache) {
  std::vector<const Chromosome*> pending;
  for (const auto& m : members) {
    if (!cache.contains(m.chromosome) &&
        std::none_of(pending.begin(), pending.end(),
                     [&](const Chromosome* p) { return *p == m.chromosome; })) {
      pending.push_back(&m.chromosome);
    }
  }

  std::vector<double> scores(pending.size());
  std::vector<std::exception_ptr> errors(pending.size());
  const auto run = [&](std::size_t worker, std::size_t n_workers) {
    for (std::size_t i = worker; i < pending.size(); i += n_workers) {
      try {
        scores[i] = fitness_fn(*pending[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(pending.size(), 1));
  if (n_workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(run, w, n_workers);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      if (errors[i]) std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("generation {}: {}", generation, e.what()));
    } catch (const std::exception& e) {
      throw eval_error(fmt::format("generation {}: {}", generation, e.what()));
    }
    if (std::isnan(scores[i])) {
      throw eval_error(fmt::format("generation {}: fitness function returned NaN", generation));
    }
    cache.emplace(*pending[i], scores[i]);
  }
  for (auto& m : members) m.fitness = cache.at(m.chromosome);
}

}  // namespace

EvolutionResult evolve(std::size_t pool_size, const GaConfig& cfg, const FitnessFn& fitness_fn) {
  cfg.validate(pool_size);
  Rng rng(cfg.seed);
  const double rate = cfg.effective_mutation_rate();
  const std::size_t offspring = cfg.pop_size - cfg.elite_count;
  const auto n_crossover = static_cast<std::size_t>(
      std::llround(cfg.crossover_fraction * static_cast<double>(offspring)));

  std::map<Chromosome, double> cache;
  std::vector<ScoredChromosome> members;
  for (auto& c : init_population(pool_size, cfg, rng)) members.push_back({std::move(c), 0.0});

  EvolutionResult result;
  std::size_t since_improvement = 0;
  for (std::size_t generation = 1;; ++generation) {
    score_generation(members, fitness_fn, cfg.threads, generation, cache);
    std::sort(members.begin(), members.end(), ranks_before);

    double sum = 0.0;
    for (const auto& m : members) sum += m.fitness;
    result.trace.push_back({generation, members.front().fitness,
                            sum / static_cast<double>(members.size()), members.front().chromosome});

    if (generation == 1 || members.front().fitness < result.best.fitness) {
      result.best = members.front();
      since_improvement = 0;
    } else {
      ++since_improvement;
    }

    if (result.best.fitness <= cfg.target_fitness) {
      result.stop_reason = StopReason::kTarget;
      break;
    }
    if (cfg.stall_generations > 0 && since_improvement >= cfg.stall_generations) {
      result.stop_reason = StopReason::kStall;
      break;
    }
    if (generation >= cfg.max_generations) {
      result.stop_reason = StopReason::kMaxGenerations;
      break;
    }

    std::vector<ScoredChromosome> next(members.begin(),
                                       members.begin() + static_cast<std::ptrdiff_t>(cfg.elite_count));
    next.reserve(cfg.pop_size);
    for (std::size_t i = 0; i < n_crossover; ++i) {
      const auto& a = select_parent(members, rng);
      const auto& b = select_parent(members, rng);
      next.push_back({scattered_crossover(a, b, pool_size, rng), 0.0});
    }
    while (next.size() < cfg.pop_size) {
      next.push_back({mutate(select_parent(members, rng), pool_size, rate, rng), 0.0});
    }
    members = std::move(next);
  }
  return result;
}

std::optional<std::uint64_t> binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t limit) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // Multiplicative formula; every partial product is itself a binomial
  // coefficient, so it stays integral.
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > limit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

ScoredChromosome exhaustive_best(std::size_t pool_size, std::size_t chromosome_size,
                                 const FitnessFn& fitness_fn, std::uint64_t cap) {
  if (chromosome_size == 0 || chromosome_size > pool_size) {
    throw config_error(fmt::format("chromosome size {} must lie in [1, {}]", chromosome_size,
                                   pool_size));
  }
  if (!binomial_capped(pool_size, chromosome_size, cap)) {
    throw config_error(fmt::format("C({}, {}) exceeds the enumeration cap {}", pool_size,
                                   chromosome_size, cap));
  }

  std::vector<std::size_t> idx(chromosome_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::optional<ScoredChromosome> best;
  while (true) {
    Chromosome c(idx);
    const double f = fitness_fn(c);
    if (std::isnan(f)) throw eval_error("fitness function returned NaN");
    if (!best || f < best->fitness) best = ScoredChromosome{std::move(c), f};

    // Advance to the next combination in lexicographic order.
    std::size_t i = chromosome_size;
    while (i > 0 && idx[i - 1] == pool_size - chromosome_size + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < chromosome_size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return *best;
}

void write_trace_csv(std::span<const GenerationRecord> trace, std::ostream& out) {
  out << "generation,best_fitness,mean_fitness,best_genes\n";
  for (const auto& r : trace) {
    out << fmt::format("{},{},{},", r.generation, r.best_fitness, r.mean_fitness);
    const auto genes = r.best.genes();
    for (std::size_t i = 0; i < genes.size(); ++i) {
      if (i > 0) out << ';';
      out << genes[i];
    }
    out << '\n';
  }
}

}  // namespace keysel
