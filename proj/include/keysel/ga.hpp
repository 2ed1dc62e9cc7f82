#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "keysel/random.hpp"

namespace keysel {

// A set of distinct keyword indices into the pool. Genes are always held in
// ascending order, which is also the canonical form for comparison.
class Chromosome {
 public:
  Chromosome() = default;
  // Sorts the genes; throws an input error on duplicates.
  explicit Chromosome(std::vector<std::size_t> genes);

  std::span<const std::size_t> genes() const { return genes_; }
  std::size_t size() const { return genes_.size(); }
  bool contains(std::size_t gene) const;

  auto operator<=>(const Chromosome&) const = default;

 private:
  std::vector<std::size_t> genes_;
};

struct ScoredChromosome {
  Chromosome chromosome;
  double fitness = 0.0;
};

using FitnessFn = std::function<double(const Chromosome&)>;

struct GaConfig {
  std::size_t pop_size = 50;
  std::size_t chromosome_size = 30;
  std::size_t elite_count = 5;
  double crossover_fraction = 0.8;
  // Per-gene mutation probability; unset means 1 / chromosome_size.
  std::optional<double> mutation_rate;
  // No default: the caller must choose a budget.
  std::size_t max_generations = 0;
  // Stop after this many generations without improvement of the best
  // fitness; 0 disables the check.
  std::size_t stall_generations = 0;
  double target_fitness = 0.0;
  std::uint64_t seed = 0;
  // Fitness evaluations per generation run on this many threads. All random
  // draws happen on the calling thread, so results do not depend on it.
  std::size_t threads = 1;

  double effective_mutation_rate() const;
  void validate(std::size_t pool_size) const;
};

// Uniform random distinct-index subsets, `pop_size` of them.
std::vector<Chromosome> init_population(std::size_t pool_size, const GaConfig& cfg,
                                        RandomSource& rng);

// Size-2 tournament with replacement: the lower fitness wins, the first draw
// wins ties. Returns the winner's position in `population`.
std::size_t select_parent_index(std::span<const ScoredChromosome> population, RandomSource& rng);

inline const Chromosome& select_parent(std::span<const ScoredChromosome> population,
                                       RandomSource& rng) {
  return population[select_parent_index(population, rng)].chromosome;
}

// Position-wise merge: gene i from `a` where mask[i] is set, else from `b`.
// The result may contain duplicates.
std::vector<std::size_t> apply_crossover_mask(const Chromosome& a, const Chromosome& b,
                                              const std::vector<bool>& mask);

// Drops repeated indices (first occurrence kept) and refills to `target_size`
// with uniformly drawn unused indices from [0, pool_size).
Chromosome repair(std::span<const std::size_t> genes, std::size_t target_size,
                  std::size_t pool_size, RandomSource& rng);

// Uniform-mask crossover followed by repair.
Chromosome scattered_crossover(const Chromosome& a, const Chromosome& b, std::size_t pool_size,
                               RandomSource& rng);

// Each gene is independently replaced, with probability `rate`, by a uniform
// index not currently in the chromosome.
Chromosome mutate(const Chromosome& c, std::size_t pool_size, double rate, RandomSource& rng);

struct GenerationRecord {
  std::size_t generation = 0;  // 1 is the initial population
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  Chromosome best;
};

enum class StopReason { kMaxGenerations, kStall, kTarget };

std::string_view stop_reason_name(StopReason reason);

struct EvolutionResult {
  ScoredChromosome best;
  std::vector<GenerationRecord> trace;
  StopReason stop_reason = StopReason::kMaxGenerations;
};

// Generational GA with elitism: each new generation keeps the `elite_count`
// best members, fills round(crossover_fraction * (pop_size - elite_count))
// slots with crossover children of tournament-selected parents and the rest
// with mutated copies of tournament-selected parents. Fitness is minimised.
EvolutionResult evolve(std::size_t pool_size, const GaConfig& cfg, const FitnessFn& fitness_fn);

// Brute-force minimum over all C(pool_size, chromosome_size) subsets in
// lexicographic order; the first minimum wins ties.
ScoredChromosome exhaustive_best(std::size_t pool_size, std::size_t chromosome_size,
                                 const FitnessFn& fitness_fn, std::uint64_t cap = 1'000'000);

// Number of k-subsets of n, or nullopt when it exceeds `limit`.
std::optional<std::uint64_t> binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t limit);

// generation,best_fitness,mean_fitness,best_genes (genes joined by ';').
void write_trace_csv(std::span<const GenerationRecord> trace, std::ostream& out);

}  // namespace keysel
