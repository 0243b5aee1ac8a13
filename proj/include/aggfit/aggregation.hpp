#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggfit/domain.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

// Ratings contributed by a set of information sources; after descending
// ordering it becomes the evidence the ordered average is applied to.
using EvidenceVector = std::vector<double>;

// Fixed-source convex combination: each weight attaches to one source.
// Lengths must match exactly; factor vectors always match their question set.
inline double weighted_average(std::span<const double> evidence,
                               std::span<const double> weights) {
  if (evidence.size() != weights.size()) {
    throw std::invalid_argument("weighted_average: evidence has " +
                                std::to_string(evidence.size()) +
                                " values, weights " +
                                std::to_string(weights.size()));
  }
  if (evidence.empty()) {
    throw std::invalid_argument("weighted_average: empty evidence");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    acc += weights[i] * evidence[i];
  }
  return acc;
}

inline double weighted_average(const EvidenceVector& evidence,
                               const WeightVector& weights) {
  return weighted_average(std::span<const double>(evidence),
                          std::span<const double>(weights.values));
}

// Position-weighted convex combination: evidence is sorted largest to
// smallest and weight j attaches to the j-th largest value. Evidence shorter
// than the weight vector is padded with zeros before ordering, so adding
// components to an attack can only add difficulty; longer evidence is an
// error.
inline double ordered_weighted_average(std::span<const double> evidence,
                                       std::span<const double> weights) {
  if (evidence.empty()) {
    throw std::invalid_argument("ordered_weighted_average: empty evidence");
  }
  if (evidence.size() > weights.size()) {
    throw std::invalid_argument(
        "ordered_weighted_average: evidence has " +
        std::to_string(evidence.size()) + " values but only " +
        std::to_string(weights.size()) + " weights");
  }
  std::vector<double> ordered(weights.size(), 0.0);
  std::copy(evidence.begin(), evidence.end(), ordered.begin());
  std::sort(ordered.begin(), ordered.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    acc += weights[j] * ordered[j];
  }
  return acc;
}

inline double ordered_weighted_average(const EvidenceVector& evidence,
                                       const WeightVector& weights) {
  return ordered_weighted_average(std::span<const double>(evidence),
                                  std::span<const double>(weights.values));
}

// Scores one attack from per-component ratings. Components occurring several
// times contribute one evidence value per occurrence.
inline double rate_attack(const AttackSpec& attack,
                          const std::map<ComponentId, double>& ratings,
                          const WeightVector& owa) {
  EvidenceVector evidence;
  evidence.reserve(attack.components.size());
  for (ComponentId c : attack.components) {
    auto it = ratings.find(c);
    if (it == ratings.end()) {
      throw DataError("attack " + std::to_string(attack.id) +
                      ": no rating for component " + std::to_string(c));
    }
    evidence.push_back(it->second);
  }
  return ordered_weighted_average(evidence, owa);
}

// Ranks aligned with `scores`: rank 1 for the largest score (most difficult),
// exact ties averaged, so ranks always sum to n(n+1)/2.
inline std::vector<double> rank_descending(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&scores](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // stable tie order for determinism
  });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Converts id -> score into id -> rank with the convention above.
template <typename Id>
std::map<Id, double> ratings_to_ranking(const std::map<Id, double>& scores) {
  if (scores.empty()) {
    throw std::invalid_argument("ratings_to_ranking: empty input");
  }
  std::vector<Id> ids;
  std::vector<double> values;
  ids.reserve(scores.size());
  values.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    ids.push_back(id);
    values.push_back(score);
  }
  const std::vector<double> ranks = rank_descending(values);
  std::map<Id, double> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = ranks[i];
  return out;
}

}  // namespace aggfit
