#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggfit/aggregation.hpp"
#include "aggfit/domain.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

// Pearson product-moment correlation. Throws on length mismatch, fewer than
// two points, or a zero-variance input (the coefficient is undefined there;
// the caller decides policy rather than receiving a silent 0).
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson_r: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("pearson_r: need at least 2 points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("pearson_r: zero-variance input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Spearman's rank correlation over two aligned rank sequences. Computed as
// Pearson over ranks, which is the tie-corrected definition: average ranks
// from tied scores are handled exactly.
inline double spearman_rho(std::span<const double> ranks_a,
                           std::span<const double> ranks_b) {
  return pearson_r(ranks_a, ranks_b);
}

template <typename Id>
double spearman_rho(const std::map<Id, double>& rank_a,
                    const std::map<Id, double>& rank_b) {
  if (rank_a.size() != rank_b.size()) {
    throw std::invalid_argument("spearman_rho: key-set mismatch");
  }
  std::vector<double> a, b;
  a.reserve(rank_a.size());
  b.reserve(rank_b.size());
  auto ib = rank_b.begin();
  for (const auto& [id, rank] : rank_a) {
    if (ib == rank_b.end() || ib->first != id) {
      throw std::invalid_argument("spearman_rho: key-set mismatch");
    }
    a.push_back(rank);
    b.push_back(ib->second);
    ++ib;
  }
  return spearman_rho(std::span<const double>(a), std::span<const double>(b));
}

// How one candidate weight vector fares against every expert.
struct ExpertFit {
  ExpertId expert_id = 0;
  double correlation = 0.0;
  double error = 0.0;
};

struct FitnessReport {
  std::vector<ExpertFit> per_expert;
  double mse = 0.0;               // mean of squared per-expert errors
  double mean_correlation = 0.0;  // arithmetic mean of per-expert correlations
};

inline FitnessReport make_fitness_report(std::vector<ExpertFit> per_expert) {
  if (per_expert.empty()) {
    throw std::invalid_argument("fitness report needs at least one expert");
  }
  FitnessReport report;
  report.per_expert = std::move(per_expert);
  double sq = 0.0, corr = 0.0;
  for (const auto& e : report.per_expert) {
    sq += e.error * e.error;
    corr += e.correlation;
  }
  const double n = static_cast<double>(report.per_expert.size());
  report.mse = sq / n;
  report.mean_correlation = corr / n;
  return report;
}

// Per-expert error for the rating-fit track: mean keeps the published error
// magnitudes on the 0-100 scale, sum is provided as the literal alternative.
enum class WaErrorMode { mean, sum };

inline const char* to_string(WaErrorMode m) {
  return m == WaErrorMode::mean ? "mean" : "sum";
}

inline WaErrorMode wa_error_mode_from_string(std::string_view s) {
  if (s == "mean") return WaErrorMode::mean;
  if (s == "sum") return WaErrorMode::sum;
  throw std::invalid_argument("unknown wa-error mode '" + std::string(s) +
                              "' (expected mean|sum)");
}

// Ranking-track fitness: candidate ordered weights -> attack scores from the
// experts' overall component ratings -> derived ranking, compared with each
// expert's actual ranking. Per-expert error is 1 - Spearman's rho; the
// report's mse aggregates over experts.
//
// The evidence vectors are gathered, zero-padded and sorted once at
// construction, so evaluating a candidate is a handful of dot products; this
// is the hot path of the EA.
class OwaFitness {
 public:
  explicit OwaFitness(const StudyData& data)
      : genome_length_(data.max_arity()) {
    if (data.attacks.empty() || genome_length_ == 0) {
      throw std::invalid_argument("ranking fitness needs attacks");
    }
    if (data.experts.empty()) {
      throw std::invalid_argument("ranking fitness needs experts");
    }
    for (const auto& expert : data.experts) {
      Entry entry;
      entry.id = expert.id;
      std::vector<double> actual;
      actual.reserve(data.attacks.size());
      for (const auto& attack : data.attacks) {
        std::vector<double> ordered(genome_length_, 0.0);
        std::size_t k = 0;
        for (ComponentId c : attack.components) {
          auto it = expert.overall_ratings.find(c);
          if (it == expert.overall_ratings.end()) {
            throw DataError("expert " + std::to_string(expert.id) +
                            ": attack " + std::to_string(attack.id) +
                            " has no rating for component " +
                            std::to_string(c));
          }
          ordered[k++] = it->second;
        }
        std::sort(ordered.begin(), ordered.end(), std::greater<>());
        entry.ordered_evidence.push_back(std::move(ordered));

        auto rit = expert.attack_ranking.find(attack.id);
        if (rit == expert.attack_ranking.end()) {
          throw DataError("expert " + std::to_string(expert.id) +
                          ": no rank for attack " + std::to_string(attack.id));
        }
        actual.push_back(rit->second);
      }
      entry.actual_ranks = std::move(actual);
      experts_.push_back(std::move(entry));
    }
  }

  std::size_t genome_length() const { return genome_length_; }

  FitnessReport operator()(const WeightVector& candidate) const {
    if (candidate.size() != genome_length_) {
      throw std::invalid_argument(
          "candidate length " + std::to_string(candidate.size()) +
          " does not match maximum attack arity " +
          std::to_string(genome_length_));
    }
    std::vector<ExpertFit> fits;
    fits.reserve(experts_.size());
    std::vector<double> scores;
    for (const auto& expert : experts_) {
      scores.clear();
      scores.reserve(expert.ordered_evidence.size());
      for (const auto& ordered : expert.ordered_evidence) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ordered.size(); ++j) {
          acc += candidate[j] * ordered[j];
        }
        scores.push_back(acc);
      }
      const std::vector<double> derived = rank_descending(scores);
      const double rho = spearman_rho(std::span<const double>(derived),
                                      std::span<const double>(expert.actual_ranks));
      fits.push_back({expert.id, rho, 1.0 - rho});
    }
    return make_fitness_report(std::move(fits));
  }

 private:
  struct Entry {
    ExpertId id = 0;
    std::vector<std::vector<double>> ordered_evidence;  // per attack
    std::vector<double> actual_ranks;                   // aligned with attacks
  };
  std::size_t genome_length_;
  std::vector<Entry> experts_;
};

// Rating-track fitness: candidate source weights reconstruct each component's
// overall rating from its factor ratings. Per-expert error is the mean (or
// sum) of absolute differences between derived and actual overall ratings
// across this category's components; the per-expert correlation compares the
// derived-rating ranking with the actual-rating ranking.
class WaFitness {
 public:
  WaFitness(const StudyData& data, Category category,
            WaErrorMode mode = WaErrorMode::mean)
      : category_(category),
        mode_(mode),
        genome_length_(QuestionSet::for_category(category).size()) {
    const std::vector<ComponentId> comps =
        data.catalog.ids_in_category(category);
    if (comps.empty()) {
      throw std::invalid_argument(std::string("no components in category ") +
                                  to_string(category));
    }
    if (data.experts.empty()) {
      throw std::invalid_argument("rating fitness needs experts");
    }
    for (const auto& expert : data.experts) {
      Entry entry;
      entry.id = expert.id;
      for (ComponentId c : comps) {
        auto fit = expert.factor_ratings.find(c);
        if (fit == expert.factor_ratings.end() ||
            fit->second.size() != genome_length_) {
          throw DataError("expert " + std::to_string(expert.id) +
                          ": factor ratings for component " +
                          std::to_string(c) + " missing or mis-sized");
        }
        entry.factors.push_back(fit->second);
        auto rit = expert.overall_ratings.find(c);
        if (rit == expert.overall_ratings.end()) {
          throw DataError("expert " + std::to_string(expert.id) +
                          ": no overall rating for component " +
                          std::to_string(c));
        }
        entry.actual.push_back(rit->second);
      }
      entry.actual_ranks = rank_descending(entry.actual);
      experts_.push_back(std::move(entry));
    }
  }

  std::size_t genome_length() const { return genome_length_; }
  Category category() const { return category_; }

  FitnessReport operator()(const WeightVector& candidate) const {
    if (candidate.size() != genome_length_) {
      throw std::invalid_argument("candidate length " +
                                  std::to_string(candidate.size()) +
                                  " does not match question count " +
                                  std::to_string(genome_length_));
    }
    std::vector<ExpertFit> fits;
    fits.reserve(experts_.size());
    std::vector<double> derived;
    for (const auto& expert : experts_) {
      derived.clear();
      derived.reserve(expert.factors.size());
      double abs_err = 0.0;
      for (std::size_t i = 0; i < expert.factors.size(); ++i) {
        const std::vector<double>& f = expert.factors[i];
        double acc = 0.0;
        for (std::size_t q = 0; q < f.size(); ++q) acc += candidate[q] * f[q];
        derived.push_back(acc);
        abs_err += std::abs(acc - expert.actual[i]);
      }
      if (mode_ == WaErrorMode::mean) {
        abs_err /= static_cast<double>(expert.factors.size());
      }
      const std::vector<double> derived_ranks = rank_descending(derived);
      const double rho =
          spearman_rho(std::span<const double>(derived_ranks),
                       std::span<const double>(expert.actual_ranks));
      fits.push_back({expert.id, rho, abs_err});
    }
    return make_fitness_report(std::move(fits));
  }

 private:
  struct Entry {
    ExpertId id = 0;
    std::vector<std::vector<double>> factors;  // per category component
    std::vector<double> actual;                // actual overall ratings
    std::vector<double> actual_ranks;
  };
  Category category_;
  WaErrorMode mode_;
  std::size_t genome_length_;
  std::vector<Entry> experts_;
};

// One-off evaluations; the EA builds the evaluator once instead.
inline FitnessReport owa_fitness(const WeightVector& candidate,
                                 const StudyData& data) {
  return OwaFitness(data)(candidate);
}

inline FitnessReport wa_fitness(const WeightVector& candidate,
                                const StudyData& data, Category category,
                                WaErrorMode mode = WaErrorMode::mean) {
  return WaFitness(data, category, mode)(candidate);
}

}  // namespace aggfit
