#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggfit/rng.hpp"
#include "aggfit/stats.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

struct EaConfig {
  int generations = 250;
  int population = 250;
  double elitism_fraction = 0.01;
  double copy_fraction = 0.0;
  double crossover_fraction = 0.20;
  double mutation_fraction = 0.79;
  int genome_length = 8;
  double mutation_delta_max = 0.05;
  std::uint64_t seed = 0;

  bool operator==(const EaConfig&) const = default;
};

inline void validate(const EaConfig& c) {
  auto fail = [](const std::string& why) {
    throw std::invalid_argument("invalid EA config: " + why);
  };
  if (c.generations < 1) fail("generations must be >= 1");
  if (c.population < 1) fail("population must be >= 1");
  if (c.genome_length < 1) fail("genome length must be >= 1");
  if (!(c.elitism_fraction >= 0.0 && c.elitism_fraction < 1.0)) {
    fail("elitism fraction must lie in [0,1)");
  }
  for (double f : {c.copy_fraction, c.crossover_fraction, c.mutation_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) fail("operator fractions must lie in [0,1]");
  }
  const double total = c.elitism_fraction + c.copy_fraction +
                       c.crossover_fraction + c.mutation_fraction;
  if (std::abs(total - 1.0) > 1e-9) {
    fail("elitism + copy + crossover + mutation must sum to 1, got " +
         std::to_string(total));
  }
  if (!(c.mutation_delta_max > 0.0)) fail("mutation delta must be > 0");
}

struct GenerationStats {
  double best_mse = 0.0;
  double mean_mse = 0.0;
};

struct EvolutionResult {
  WeightVector best;
  FitnessReport best_fitness;
  std::vector<GenerationStats> history;  // [0] is the random generation
  EaConfig config;
};

inline bool best_mse_non_increasing(const std::vector<GenerationStats>& h) {
  for (std::size_t g = 1; g < h.size(); ++g) {
    if (h[g].best_mse > h[g - 1].best_mse) return false;
  }
  return true;
}

// Stick-breaking simplex sample: n-1 uniform cut points on [0,1], weights are
// the gap lengths between 0, the sorted points, and 1. Sums to 1 by
// construction.
template <typename Random>
WeightVector random_genome(int n, Random& rng) {
  if (n < 1) throw std::invalid_argument("genome length must be >= 1");
  std::vector<double> cuts(static_cast<std::size_t>(n) - 1);
  for (double& c : cuts) c = rng.uniform01();
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> weights(static_cast<std::size_t>(n));
  double prev = 0.0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    weights[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  weights.back() = 1.0 - prev;
  return WeightVector{std::move(weights)};
}

// Linear-ranking selection over a population sorted ascending by mse:
// index i is returned with probability 2(N-i) / (N(N+1)), so the best
// individual is most likely but every index stays reachable.
template <typename Random>
std::size_t select_parent(std::size_t population_size, Random& rng) {
  if (population_size == 0) {
    throw std::invalid_argument("select_parent: empty population");
  }
  const double n = static_cast<double>(population_size);
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t i = 0; i < population_size; ++i) {
    cum += 2.0 * (n - static_cast<double>(i)) / (n * (n + 1.0));
    if (u < cum) return i;
  }
  return population_size - 1;
}

// Moves mass delta ~ U(0, delta_max] from one weight to another; draws that
// would leave [0,1] are discarded and indices and delta are re-drawn. The sum
// is conserved, so the simplex invariant survives mutation.
template <typename Random>
WeightVector mutate(const WeightVector& genome, double delta_max, Random& rng) {
  const std::size_t n = genome.size();
  if (n < 2) throw std::invalid_argument("mutate: genome length must be >= 2");
  if (!(delta_max > 0.0)) {
    throw std::invalid_argument("mutate: delta_max must be > 0");
  }
  WeightVector out = genome;
  for (;;) {
    const std::size_t up = rng.below(n);
    std::size_t down = rng.below(n - 1);
    if (down >= up) ++down;
    const double delta = (1.0 - rng.uniform01()) * delta_max;  // (0, delta_max]
    const double raised = out.values[up] + delta;
    const double lowered = out.values[down] - delta;
    if (raised <= 1.0 && lowered >= 0.0) {
      out.values[up] = raised;
      out.values[down] = lowered;
      return out;
    }
  }
}

// Single-point crossover at the midpoint: first half of parent a, second half
// of parent b, renormalized to unit sum. A zero-sum concatenation falls back
// to a copy of parent a.
inline WeightVector crossover(const WeightVector& a, const WeightVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("crossover: length mismatch");
  }
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("crossover: need length >= 2");
  const std::size_t split = n / 2;
  std::vector<double> child(n);
  for (std::size_t i = 0; i < split; ++i) child[i] = a[i];
  for (std::size_t i = split; i < n; ++i) child[i] = b[i];
  const double sum = std::accumulate(child.begin(), child.end(), 0.0);
  if (sum == 0.0) return a;
  for (double& w : child) w /= sum;
  return WeightVector{std::move(child)};
}

// Generational EA over simplex-constrained genomes. Each new generation is
// elitism (best copied unaltered) + copies + crossover children + mutants,
// with parents drawn by linear-ranking selection; leftover slots from
// rounding go to mutation so the population size stays constant. All random
// draws come from one stream seeded by config.seed, making the run a pure
// function of (config, fitness).
template <typename Fitness>
EvolutionResult evolve(const EaConfig& config, Fitness&& fitness) {
  validate(config);
  Rng rng(config.seed);

  const std::size_t pop_size = static_cast<std::size_t>(config.population);
  const std::size_t n_elite =
      config.elitism_fraction > 0.0
          ? static_cast<std::size_t>(std::ceil(config.elitism_fraction *
                                               config.population))
          : 0;
  const std::size_t n_copy = static_cast<std::size_t>(
      std::floor(config.copy_fraction * config.population));
  const std::size_t n_cross = static_cast<std::size_t>(
      std::floor(config.crossover_fraction * config.population));
  if (n_elite + n_copy + n_cross > pop_size) {
    throw std::invalid_argument("invalid EA config: operator counts exceed population");
  }
  const std::size_t n_mutate = pop_size - n_elite - n_copy - n_cross;
  if (n_mutate > 0 && config.genome_length < 2) {
    throw std::invalid_argument(
        "invalid EA config: mutation needs genome length >= 2");
  }

  std::vector<WeightVector> population;
  population.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    population.push_back(random_genome(config.genome_length, rng));
  }

  EvolutionResult result;
  result.config = config;
  result.history.reserve(static_cast<std::size_t>(config.generations));

  std::vector<FitnessReport> reports(pop_size);
  std::vector<std::size_t> order(pop_size);
  double best_mse = std::numeric_limits<double>::infinity();

  auto evaluate_generation = [&]() {
    double mse_sum = 0.0;
    for (std::size_t i = 0; i < pop_size; ++i) {
      reports[i] = fitness(population[i]);
      mse_sum += reports[i].mse;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&reports](std::size_t a, std::size_t b) {
                       return reports[a].mse < reports[b].mse;
                     });
    const std::size_t top = order.front();
    if (reports[top].mse < best_mse) {
      best_mse = reports[top].mse;
      result.best = population[top];
      result.best_fitness = reports[top];
    }
    result.history.push_back(
        {reports[top].mse, mse_sum / static_cast<double>(pop_size)});
  };

  evaluate_generation();

  std::vector<WeightVector> next;
  next.reserve(pop_size);
  for (int gen = 1; gen < config.generations; ++gen) {
    next.clear();
    for (std::size_t k = 0; k < n_elite; ++k) {
      next.push_back(population[order[k]]);
    }
    for (std::size_t k = 0; k < n_copy; ++k) {
      next.push_back(population[order[select_parent(pop_size, rng)]]);
    }
    for (std::size_t k = 0; k < n_cross; ++k) {
      const WeightVector& pa = population[order[select_parent(pop_size, rng)]];
      const WeightVector& pb = population[order[select_parent(pop_size, rng)]];
      next.push_back(crossover(pa, pb));
    }
    for (std::size_t k = 0; k < n_mutate; ++k) {
      next.push_back(mutate(population[order[select_parent(pop_size, rng)]],
                            config.mutation_delta_max, rng));
    }
    population.swap(next);
    evaluate_generation();
  }

  return result;
}

}  // namespace aggfit
