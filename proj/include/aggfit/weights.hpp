#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aggfit {

inline constexpr double kSimplexTolerance = 1e-9;

// Point on the probability simplex. Parameterizes both the fixed-source
// average (weights attach to sources) and the ordered average (weights
// attach to sort positions), and is the genome evolved by the EA.
struct WeightVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  bool operator==(const WeightVector&) const = default;
};

inline bool is_simplex(const std::vector<double>& values,
                       double tol = kSimplexTolerance) {
  if (values.empty()) return false;
  double sum = 0.0;
  for (double w : values) {
    if (!(w >= 0.0 && w <= 1.0)) return false;  // also rejects NaN
    sum += w;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline bool is_simplex(const WeightVector& w, double tol = kSimplexTolerance) {
  return is_simplex(w.values, tol);
}

// Validating constructor for weights coming from user input or config.
inline WeightVector make_weights(std::vector<double> values) {
  if (!is_simplex(values)) {
    throw std::invalid_argument(
        "weights must be in [0,1] and sum to 1 within 1e-9");
  }
  return WeightVector{std::move(values)};
}

// Rescales to unit sum. Rejects non-negative-able or zero-sum input.
inline WeightVector normalized_weights(std::vector<double> values) {
  double sum = 0.0;
  for (double w : values) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be >= 0");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("weights sum to zero");
  for (double& w : values) w /= sum;
  return WeightVector{std::move(values)};
}

inline double l1_distance(const WeightVector& a, const WeightVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("l1_distance: length mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace aggfit
