#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aggfit/aggregation.hpp"
#include "aggfit/domain.hpp"
#include "aggfit/evolution.hpp"
#include "aggfit/rng.hpp"
#include "aggfit/stats.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

// Which fit is being trained: ordered weights against attack rankings, or
// source weights against one category's overall ratings.
enum class Track { owa, wa_attack, wa_evade };

inline const char* to_string(Track t) {
  switch (t) {
    case Track::owa:
      return "owa";
    case Track::wa_attack:
      return "wa-attack";
    default:
      return "wa-evade";
  }
}

inline Track track_from_string(std::string_view s) {
  if (s == "owa") return Track::owa;
  if (s == "wa-attack") return Track::wa_attack;
  if (s == "wa-evade") return Track::wa_evade;
  throw std::invalid_argument("unknown track '" + std::string(s) +
                              "' (expected owa|wa-attack|wa-evade)");
}

inline int track_genome_length(Track track, const StudyData& data) {
  switch (track) {
    case Track::owa:
      return static_cast<int>(data.max_arity());
    case Track::wa_attack:
      return static_cast<int>(QuestionSet::attack().size());
    default:
      return static_cast<int>(QuestionSet::evade().size());
  }
}

struct SweepRow {
  int test_id = 0;
  EaConfig config;
};

struct SweepPlan {
  Track track = Track::owa;
  SplitScheme group = SplitScheme::all;
  std::vector<SweepRow> rows;
};

// Operator-proportion sweep (tests 1-10): fixed 250x250 run with 1% elitism,
// varying the copy / crossover / mutation split.
inline SweepPlan proportions_plan(Track track, SplitScheme group,
                                  int genome_length) {
  static constexpr struct {
    double copy, cross, mut;
  } kProportions[] = {
      {0.00, 0.20, 0.79}, {0.20, 0.20, 0.59}, {0.40, 0.20, 0.39},
      {0.60, 0.20, 0.19}, {0.79, 0.20, 0.00}, {0.50, 0.00, 0.49},
      {0.30, 0.40, 0.29}, {0.20, 0.60, 0.19}, {0.10, 0.80, 0.09},
      {0.00, 0.99, 0.00},
  };
  SweepPlan plan{track, group, {}};
  int test_id = 1;
  for (const auto& p : kProportions) {
    EaConfig config;
    config.generations = 250;
    config.population = 250;
    config.elitism_fraction = 0.01;
    config.copy_fraction = p.copy;
    config.crossover_fraction = p.cross;
    config.mutation_fraction = p.mut;
    config.genome_length = genome_length;
    plan.rows.push_back({test_id++, config});
  }
  return plan;
}

// Population/generations sweep (tests 11-16) at a fixed operator split.
inline SweepPlan popgen_plan(Track track, SplitScheme group, int genome_length,
                             double copy = 0.00, double cross = 0.20,
                             double mut = 0.79) {
  static constexpr struct {
    int gens, pop;
  } kSizes[] = {
      {50, 1250}, {100, 625}, {200, 315}, {300, 210}, {400, 155}, {500, 125},
  };
  SweepPlan plan{track, group, {}};
  int test_id = 11;
  for (const auto& s : kSizes) {
    EaConfig config;
    config.generations = s.gens;
    config.population = s.pop;
    config.elitism_fraction = 0.01;
    config.copy_fraction = copy;
    config.crossover_fraction = cross;
    config.mutation_fraction = mut;
    config.genome_length = genome_length;
    plan.rows.push_back({test_id++, config});
  }
  return plan;
}

inline SweepPlan built_in_plan(std::string_view name, Track track,
                               SplitScheme group, int genome_length) {
  if (name == "proportions") return proportions_plan(track, group, genome_length);
  if (name == "popgen") return popgen_plan(track, group, genome_length);
  throw std::invalid_argument("unknown plan '" + std::string(name) +
                              "' (expected proportions|popgen)");
}

struct SweepRowResult {
  int test_id = 0;
  double mean_correlation = 0.0;
  double mse = 0.0;
  WeightVector best;
};

struct SweepReport {
  Track track = Track::owa;
  SplitScheme group = SplitScheme::all;
  std::vector<SweepRowResult> rows;
  std::size_t best_row = 0;  // index into rows; minimal mse, lowest id on tie
};

namespace detail {

inline EvolutionResult evolve_track(const EaConfig& config, Track track,
                                    const StudyData& data, WaErrorMode mode) {
  switch (track) {
    case Track::owa:
      return evolve(config, OwaFitness(data));
    case Track::wa_attack:
      return evolve(config, WaFitness(data, Category::attack, mode));
    default:
      return evolve(config, WaFitness(data, Category::evade, mode));
  }
}

}  // namespace detail

// Runs every row of a sweep on the plan's expert group. Rows get independent
// seeds derived from (base_seed, test_id), so adding or reordering rows never
// changes another row's outcome.
inline SweepReport run_sweep(const SweepPlan& plan, const StudyData& data,
                             std::uint64_t base_seed,
                             WaErrorMode mode = WaErrorMode::mean) {
  if (plan.rows.empty()) throw std::invalid_argument("sweep plan has no rows");
  const StudyData group_data = split_experts(data, plan.group);
  const int genome_length = track_genome_length(plan.track, group_data);

  SweepReport report;
  report.track = plan.track;
  report.group = plan.group;
  for (const SweepRow& row : plan.rows) {
    EaConfig config = row.config;
    if (config.genome_length != genome_length) {
      throw std::invalid_argument(
          "sweep row " + std::to_string(row.test_id) + " has genome length " +
          std::to_string(config.genome_length) + ", track requires " +
          std::to_string(genome_length));
    }
    config.seed = mix_seed(base_seed, static_cast<std::uint64_t>(row.test_id));
    const EvolutionResult result =
        detail::evolve_track(config, plan.track, group_data, mode);
    report.rows.push_back({row.test_id, result.best_fitness.mean_correlation,
                           result.best_fitness.mse, result.best});
  }
  report.best_row = 0;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].mse < report.rows[report.best_row].mse) {
      report.best_row = i;
    }
  }
  return report;
}

// Applies ordered weights trained on one parity group to the other group.
// Returns the alternate-group fitness; the degradation is read off against
// the training-group report.
inline FitnessReport cross_group_robustness(const WeightVector& owa,
                                            SplitScheme train_group,
                                            const StudyData& data) {
  SplitScheme other;
  switch (train_group) {
    case SplitScheme::odd:
      other = SplitScheme::even;
      break;
    case SplitScheme::even:
      other = SplitScheme::odd;
      break;
    default:
      throw std::invalid_argument(
          "cross-group robustness needs an odd or even training group");
  }
  return owa_fitness(owa, split_experts(data, other));
}

struct SummaryStats {
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation
};

inline SummaryStats summarize(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw std::invalid_argument("summary needs at least two values");
  }
  SummaryStats s;
  s.max = *std::max_element(values.begin(), values.end());
  s.min = *std::min_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return s;
}

struct ExtendedSummary {
  SummaryStats correlation;
  SummaryStats mse;
  std::vector<double> per_seed_correlation;
  std::vector<double> per_seed_mse;
  std::vector<WeightVector> per_seed_best;
  bool all_histories_monotone = true;
};

// Repeats one configuration across consecutive seeds (config.seed,
// config.seed + 1, ...) and summarizes the per-seed bests, giving a
// stability readout for the configuration.
inline ExtendedSummary extended_runs(const EaConfig& config, Track track,
                                     const StudyData& data, int n_seeds,
                                     WaErrorMode mode = WaErrorMode::mean) {
  if (n_seeds < 2) throw std::invalid_argument("extended runs need >= 2 seeds");
  ExtendedSummary summary;
  for (int s = 0; s < n_seeds; ++s) {
    EaConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(s);
    const EvolutionResult result =
        detail::evolve_track(run_config, track, data, mode);
    summary.per_seed_correlation.push_back(
        result.best_fitness.mean_correlation);
    summary.per_seed_mse.push_back(result.best_fitness.mse);
    summary.per_seed_best.push_back(result.best);
    summary.all_histories_monotone = summary.all_histories_monotone &&
                                     best_mse_non_increasing(result.history);
  }
  summary.correlation = summarize(summary.per_seed_correlation);
  summary.mse = summarize(summary.per_seed_mse);
  return summary;
}

// Two-stage pipeline: category-matched source weights reconstruct every
// component's overall rating from its factor ratings, the ordered weights
// score each attack from those derived ratings, and the resulting ranking is
// compared with the expert's actual ranking. Per-expert error is 1 - rho by
// definition.
inline FitnessReport chained_pipeline(const WeightVector& wa_attack,
                                      const WeightVector& wa_evade,
                                      const WeightVector& owa,
                                      const StudyData& data) {
  if (wa_attack.size() != QuestionSet::attack().size() ||
      wa_evade.size() != QuestionSet::evade().size()) {
    throw std::invalid_argument(
        "source weights must match the question-set sizes");
  }
  if (owa.size() != data.max_arity()) {
    throw std::invalid_argument(
        "ordered weights must match the maximum attack arity");
  }
  if (data.experts.empty()) {
    throw std::invalid_argument("chained pipeline needs experts");
  }
  std::vector<ExpertFit> fits;
  fits.reserve(data.experts.size());
  for (const auto& expert : data.experts) {
    std::map<ComponentId, double> derived_ratings;
    for (const auto& [comp, cat] : data.catalog.entries) {
      auto it = expert.factor_ratings.find(comp);
      if (it == expert.factor_ratings.end()) {
        throw DataError("expert " + std::to_string(expert.id) +
                        ": no factor ratings for component " +
                        std::to_string(comp));
      }
      const WeightVector& wa =
          cat == Category::attack ? wa_attack : wa_evade;
      derived_ratings[comp] = weighted_average(it->second, wa);
    }
    std::map<AttackId, double> scores;
    for (const auto& attack : data.attacks) {
      scores[attack.id] = rate_attack(attack, derived_ratings, owa);
    }
    const auto derived_ranking = ratings_to_ranking(scores);
    const double rho = spearman_rho(derived_ranking, expert.attack_ranking);
    fits.push_back({expert.id, rho, 1.0 - rho});
  }
  return make_fitness_report(std::move(fits));
}

}  // namespace aggfit
