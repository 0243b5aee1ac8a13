#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aggfit/errors.hpp"

namespace aggfit {

using ComponentId = int;
using AttackId = int;
using ExpertId = int;

// A security component is either attacked (compromised) or evaded (bypassed)
// within an attack path; the category decides which factor-question schema
// applies to it.
enum class Category { attack, evade };

inline const char* to_string(Category c) {
  return c == Category::attack ? "attack" : "evade";
}

inline Category category_from_string(std::string_view s) {
  if (s == "attack") return Category::attack;
  if (s == "evade") return Category::evade;
  throw DataError("unknown category '" + std::string(s) +
                  "' (expected attack|evade)");
}

struct Question {
  std::string id;    // positional id: A1..A7 or E1..E3
  std::string text;  // short display label
};

// Factor-question schema for one component category. The overall-difficulty
// answer is the target of the fit and lives in ExpertDataset::overall_ratings,
// not here.
struct QuestionSet {
  Category category;
  std::vector<Question> questions;

  std::size_t size() const { return questions.size(); }

  static const QuestionSet& attack() {
    static const QuestionSet set{
        Category::attack,
        {{"A1", "complexity of the target component"},
         {"A2", "interaction with data input"},
         {"A3", "frequency of public reports of this attack"},
         {"A4", "availability of a public tool"},
         {"A5", "inherent difficulty of the attack"},
         {"A6", "maturity of the technology"},
         {"A7", "ease of acting unnoticed"}}};
    return set;
  }

  static const QuestionSet& evade() {
    static const QuestionSet set{
        Category::evade,
        {{"E1", "complexity of providing the defence"},
         {"E2", "availability of public information for evasion"},
         {"E3", "maturity of the technology"}}};
    return set;
  }

  static const QuestionSet& for_category(Category c) {
    return c == Category::attack ? attack() : evade();
  }

  // Index of a question id within this set, or -1 when absent.
  int index_of(std::string_view id) const {
    for (std::size_t i = 0; i < questions.size(); ++i) {
      if (questions[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }
};

// Ordered component sequence forming one end-to-end technical attack.
// Components may repeat when several instances must be compromised.
struct AttackSpec {
  AttackId id = 0;
  std::vector<ComponentId> components;

  std::size_t arity() const { return components.size(); }

  bool operator==(const AttackSpec&) const = default;
};

struct ComponentCatalog {
  std::map<ComponentId, Category> entries;

  std::size_t size() const { return entries.size(); }
  bool contains(ComponentId id) const { return entries.count(id) != 0; }

  Category category_of(ComponentId id) const {
    auto it = entries.find(id);
    if (it == entries.end()) {
      throw DataError("component " + std::to_string(id) + " not in catalog");
    }
    return it->second;
  }

  std::vector<ComponentId> ids_in_category(Category c) const {
    std::vector<ComponentId> out;
    for (const auto& [id, cat] : entries) {
      if (cat == c) out.push_back(id);
    }
    return out;
  }

  bool operator==(const ComponentCatalog&) const = default;
};

// One expert's responses across all three assessment levels.
struct ExpertDataset {
  ExpertId id = 0;
  // attack id -> rank; 1 = most difficult, ties carry average ranks
  std::map<AttackId, double> attack_ranking;
  // component id -> overall difficulty rating in [0, 100]
  std::map<ComponentId, double> overall_ratings;
  // component id -> factor ratings, aligned with the category's QuestionSet
  std::map<ComponentId, std::vector<double>> factor_ratings;

  bool operator==(const ExpertDataset&) const = default;
};

struct StudyData {
  ComponentCatalog catalog;
  std::vector<AttackSpec> attacks;
  std::vector<ExpertDataset> experts;

  std::size_t max_arity() const {
    std::size_t m = 0;
    for (const auto& a : attacks) m = std::max(m, a.arity());
    return m;
  }

  bool operator==(const StudyData&) const = default;
};

struct Violation {
  std::string entity;
  std::string rule;
};

inline bool in_rating_range(double r) { return r >= 0.0 && r <= 100.0; }

// Structural integrity check. Violations are data, not faults: the function
// never throws on bad content, it reports every broken rule with the entity
// that broke it. An empty result means every invariant holds.
inline std::vector<Violation> validate_study(const StudyData& data) {
  std::vector<Violation> out;
  auto add = [&out](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  for (const auto& [id, cat] : data.catalog.entries) {
    if (id <= 0) add("component " + std::to_string(id), "id must be positive");
  }

  if (data.attacks.empty()) add("study", "no attacks defined");
  std::map<AttackId, int> attack_seen;
  for (const auto& attack : data.attacks) {
    const std::string name = "attack " + std::to_string(attack.id);
    if (attack.id <= 0) add(name, "id must be positive");
    if (++attack_seen[attack.id] > 1) add(name, "duplicate attack id");
    if (attack.components.empty()) add(name, "component list is empty");
    for (ComponentId c : attack.components) {
      if (!data.catalog.contains(c)) {
        add(name, "references component " + std::to_string(c) +
                      " missing from catalog");
      }
    }
  }

  if (data.experts.empty()) add("study", "no experts present");
  std::map<ExpertId, int> expert_seen;
  const std::size_t n_attacks = data.attacks.size();
  for (const auto& expert : data.experts) {
    const std::string name = "expert " + std::to_string(expert.id);
    if (expert.id <= 0) add(name, "id must be positive");
    if (++expert_seen[expert.id] > 1) add(name, "duplicate expert id");

    // ranking coverage and tie-averaged permutation identity
    double rank_sum = 0.0;
    for (const auto& attack : data.attacks) {
      auto it = expert.attack_ranking.find(attack.id);
      if (it == expert.attack_ranking.end()) {
        add(name, "missing rank for attack " + std::to_string(attack.id));
        continue;
      }
      const double rank = it->second;
      rank_sum += rank;
      if (!(rank >= 1.0 && rank <= static_cast<double>(n_attacks))) {
        add(name, "rank " + std::to_string(rank) + " for attack " +
                      std::to_string(attack.id) + " outside 1.." +
                      std::to_string(n_attacks));
      }
    }
    for (const auto& [attack_id, rank] : expert.attack_ranking) {
      (void)rank;
      bool known = std::any_of(
          data.attacks.begin(), data.attacks.end(),
          [attack_id](const AttackSpec& a) { return a.id == attack_id; });
      if (!known) {
        add(name, "ranks unknown attack " + std::to_string(attack_id));
      }
    }
    const double expected_sum =
        static_cast<double>(n_attacks) * (n_attacks + 1) / 2.0;
    if (expert.attack_ranking.size() == n_attacks &&
        std::abs(rank_sum - expected_sum) > 1e-6) {
      add(name, "rank sum " + std::to_string(rank_sum) +
                    " differs from required " + std::to_string(expected_sum));
    }

    // rating coverage per catalog component
    for (const auto& [comp, cat] : data.catalog.entries) {
      const std::string comp_name = "component " + std::to_string(comp);
      auto rit = expert.overall_ratings.find(comp);
      if (rit == expert.overall_ratings.end()) {
        add(name, "missing overall rating for " + comp_name);
      } else if (!in_rating_range(rit->second)) {
        add(name, "overall rating for " + comp_name + " outside [0,100]");
      }

      const QuestionSet& qs = QuestionSet::for_category(cat);
      auto fit = expert.factor_ratings.find(comp);
      if (fit == expert.factor_ratings.end()) {
        add(name, "missing factor ratings for " + comp_name);
        continue;
      }
      if (fit->second.size() != qs.size()) {
        add(name, "factor ratings for " + comp_name + " have " +
                      std::to_string(fit->second.size()) + " entries, " +
                      std::to_string(qs.size()) + " required");
        continue;
      }
      for (std::size_t q = 0; q < fit->second.size(); ++q) {
        const double r = fit->second[q];
        if (std::isnan(r)) {
          add(name, "missing factor rating " + qs.questions[q].id + " for " +
                        comp_name);
        } else if (!in_rating_range(r)) {
          add(name, "factor rating " + qs.questions[q].id + " for " +
                        comp_name + " outside [0,100]");
        }
      }
    }
    for (const auto& [comp, rating] : expert.overall_ratings) {
      (void)rating;
      if (!data.catalog.contains(comp)) {
        add(name,
            "rates component " + std::to_string(comp) + " not in catalog");
      }
    }
    for (const auto& [comp, factors] : expert.factor_ratings) {
      (void)factors;
      if (!data.catalog.contains(comp)) {
        add(name, "has factor ratings for component " + std::to_string(comp) +
                      " not in catalog");
      }
    }
  }

  return out;
}

// Expert grouping used for robustness experiments: experts with odd ids,
// even ids, or everyone.
enum class SplitScheme { odd, even, all };

inline const char* to_string(SplitScheme s) {
  switch (s) {
    case SplitScheme::odd:
      return "odd";
    case SplitScheme::even:
      return "even";
    default:
      return "all";
  }
}

inline SplitScheme split_scheme_from_string(std::string_view s) {
  if (s == "odd") return SplitScheme::odd;
  if (s == "even") return SplitScheme::even;
  if (s == "all") return SplitScheme::all;
  throw std::invalid_argument("unknown group '" + std::string(s) +
                              "' (expected odd|even|all)");
}

// Keeps the experts whose id parity matches the scheme; catalog and attacks
// are shared unchanged.
inline StudyData split_experts(const StudyData& data, SplitScheme scheme) {
  StudyData out;
  out.catalog = data.catalog;
  out.attacks = data.attacks;
  for (const auto& expert : data.experts) {
    const bool odd = (expert.id % 2) != 0;
    if (scheme == SplitScheme::all || (scheme == SplitScheme::odd && odd) ||
        (scheme == SplitScheme::even && !odd)) {
      out.experts.push_back(expert);
    }
  }
  if (out.experts.empty()) {
    throw DataError(std::string("no experts in group '") + to_string(scheme) +
                    "'");
  }
  return out;
}

}  // namespace aggfit
