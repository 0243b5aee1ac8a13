#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggfit/aggregation.hpp"
#include "aggfit/domain.hpp"
#include "aggfit/reference.hpp"
#include "aggfit/rng.hpp"
#include "aggfit/stats.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

// Bundled study layout: ten attacks over a 26-component catalog. The
// attack/evade split of the catalog is an assumed assignment (ids 1-13
// attack, 14-26 evade); the original exercise never published one.
inline std::vector<AttackSpec> standard_attacks() {
  return {
      {1, {2, 3, 1, 4, 5}},
      {2, {6, 7, 6, 8, 4}},
      {3, {9}},
      {4, {10, 11, 4, 5}},
      {5, {12, 13, 2, 3, 14, 15, 4, 5}},
      {6, {16, 16, 17, 4, 5}},
      {7, {6, 18, 4, 5}},
      {8, {19, 20, 21}},
      {9, {22, 23, 24}},
      {10, {25, 26, 1, 4, 5}},
  };
}

inline ComponentCatalog standard_catalog() {
  ComponentCatalog catalog;
  for (ComponentId id = 1; id <= 26; ++id) {
    catalog.entries[id] = id <= 13 ? Category::attack : Category::evade;
  }
  return catalog;
}

// Generator parameters for synthetic expert studies with known ground truth.
// The planted operators default to the best published chained operators. The
// default noise levels are arbitrary: no raw data exists to calibrate them;
// recovery tests set them to zero explicitly.
struct SynthParams {
  int n_experts = 20;
  WeightVector planted_owa = reference_owa();
  WeightVector planted_wa_attack = reference_wa_attack();
  WeightVector planted_wa_evade = reference_wa_evade();
  double factor_noise_sigma = 5.0;
  double ranking_noise_sigma = 2.0;
  std::uint64_t seed = 0;
};

// Params with every noise source disabled: the planted operators reproduce
// the data exactly.
inline SynthParams noiseless_params() {
  SynthParams params;
  params.factor_noise_sigma = 0.0;
  params.ranking_noise_sigma = 0.0;
  return params;
}

// Synthesizes a full study with planted ground truth. Per expert and
// component, latent factor ratings are uniform on [0,100]; the reported
// factor ratings add expert-idiosyncrasy Gaussian noise (clipped back to
// [0,100]) while the overall rating is the planted WA of the latent factors,
// so with zero factor noise the planted WA reconstructs every overall rating
// exactly. Attack scores are the planted OWA of the overall ratings plus
// ranking noise, then converted to ranks. Deterministic in (inputs, seed).
inline StudyData generate_study(const std::vector<AttackSpec>& attacks,
                                const ComponentCatalog& catalog,
                                const SynthParams& params) {
  if (params.n_experts < 1) {
    throw std::invalid_argument("n_experts must be >= 1");
  }
  if (params.factor_noise_sigma < 0.0 || params.ranking_noise_sigma < 0.0) {
    throw std::invalid_argument("noise sigmas must be >= 0");
  }
  for (const WeightVector* w :
       {&params.planted_owa, &params.planted_wa_attack,
        &params.planted_wa_evade}) {
    if (!is_simplex(*w)) {
      throw std::invalid_argument("planted weights must lie on the simplex");
    }
  }
  StudyData data;
  data.catalog = catalog;
  data.attacks = attacks;
  const std::size_t arity = data.max_arity();
  if (params.planted_owa.size() != arity) {
    throw std::invalid_argument(
        "planted ordered weights have length " +
        std::to_string(params.planted_owa.size()) +
        " but the maximum attack arity is " + std::to_string(arity));
  }
  if (params.planted_wa_attack.size() != QuestionSet::attack().size() ||
      params.planted_wa_evade.size() != QuestionSet::evade().size()) {
    throw std::invalid_argument(
        "planted source weights must match the question-set sizes");
  }

  Rng rng(params.seed);
  std::vector<double> latent;
  for (int e = 1; e <= params.n_experts; ++e) {
    ExpertDataset expert;
    expert.id = e;
    for (const auto& [comp, cat] : catalog.entries) {
      const QuestionSet& qs = QuestionSet::for_category(cat);
      latent.resize(qs.size());
      std::vector<double> reported(qs.size());
      for (std::size_t q = 0; q < qs.size(); ++q) {
        latent[q] = rng.uniform(0.0, 100.0);
        double r = latent[q];
        if (params.factor_noise_sigma > 0.0) {
          r = std::clamp(rng.gaussian(r, params.factor_noise_sigma), 0.0,
                         100.0);
        }
        reported[q] = r;
      }
      const WeightVector& wa = cat == Category::attack
                                   ? params.planted_wa_attack
                                   : params.planted_wa_evade;
      expert.overall_ratings[comp] = weighted_average(latent, wa);
      expert.factor_ratings[comp] = std::move(reported);
    }
    std::map<AttackId, double> scores;
    for (const auto& attack : attacks) {
      double score = rate_attack(attack, expert.overall_ratings,
                                 params.planted_owa);
      if (params.ranking_noise_sigma > 0.0) {
        score = rng.gaussian(score, params.ranking_noise_sigma);
      }
      scores[attack.id] = score;
    }
    expert.attack_ranking = ratings_to_ranking(scores);
    data.experts.push_back(std::move(expert));
  }
  return data;
}

inline StudyData generate_standard_study(const SynthParams& params) {
  return generate_study(standard_attacks(), standard_catalog(), params);
}

// All points (k_1..k_n)/m with sum k_i = m, m = 1/step, in lexicographic
// order. Values are exact IEEE quotients k/m, so grid points print and
// compare cleanly.
inline std::vector<std::vector<double>> simplex_grid(int n, double step) {
  if (n < 1) throw std::invalid_argument("grid dimension must be >= 1");
  const double m_real = 1.0 / step;
  const long long m = std::llround(m_real);
  if (!(step > 0.0) || m < 1 || std::abs(m_real - static_cast<double>(m)) > 1e-9) {
    throw std::invalid_argument("step must divide 1");
  }
  // grid size is C(m+n-1, n-1); refuse runaway enumerations
  double count = 1.0;
  for (int i = 1; i < n; ++i) {
    count *= static_cast<double>(m + i) / static_cast<double>(i);
  }
  if (count > 1e7) {
    throw std::invalid_argument("simplex grid would exceed 1e7 points");
  }

  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(count) + 1);
  std::vector<long long> k(static_cast<std::size_t>(n), 0);
  std::vector<double> point(static_cast<std::size_t>(n));
  auto emit = [&]() {
    for (std::size_t i = 0; i < k.size(); ++i) {
      point[i] = static_cast<double>(k[i]) / static_cast<double>(m);
    }
    grid.push_back(point);
  };
  // recursive composition enumeration, first coordinate slowest
  auto rec = [&](auto&& self, std::size_t pos, long long remaining) -> void {
    if (pos + 1 == k.size()) {
      k[pos] = remaining;
      emit();
      return;
    }
    for (long long v = 0; v <= remaining; ++v) {
      k[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, m);
  return grid;
}

// Exhaustive grid oracle for the ranking track: lowest-mse grid point, ties
// broken toward the lexicographically smallest point. Intended for small
// instances only (n <= 4), where it bounds what the EA can achieve.
inline WeightVector brute_force_owa(const StudyData& data, int n,
                                    double step) {
  if (n < 1 || n > 4) {
    throw std::invalid_argument("brute_force_owa supports n <= 4");
  }
  if (static_cast<std::size_t>(n) != data.max_arity()) {
    throw std::invalid_argument(
        "grid dimension must equal the data's maximum attack arity");
  }
  const OwaFitness fitness(data);
  WeightVector best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (const auto& point : simplex_grid(n, step)) {
    const WeightVector candidate{point};
    const double mse = fitness(candidate).mse;
    if (mse < best_mse) {
      best_mse = mse;
      best = candidate;
    }
  }
  return best;
}

// Grid oracle for the rating track; the genome length is the category's
// question count (the 3-question set is exhaustively tractable at fine steps).
inline WeightVector brute_force_wa(const StudyData& data, Category category,
                                   double step,
                                   WaErrorMode mode = WaErrorMode::mean) {
  const WaFitness fitness(data, category, mode);
  WeightVector best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (const auto& point :
       simplex_grid(static_cast<int>(fitness.genome_length()), step)) {
    const WeightVector candidate{point};
    const double mse = fitness(candidate).mse;
    if (mse < best_mse) {
      best_mse = mse;
      best = candidate;
    }
  }
  return best;
}

}  // namespace aggfit
