#include "aggfit/domain.hpp"

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "aggfit/synthesis.hpp"

using namespace aggfit;

namespace {

StudyData small_valid_study(int n_experts) {
  SynthParams params = noiseless_params();
  params.n_experts = n_experts;
  params.seed = 3;
  return generate_standard_study(params);
}

bool has_violation(const std::vector<Violation>& violations,
                   const std::string& entity, const std::string& rule_part) {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) {
                       return v.entity == entity &&
                              v.rule.find(rule_part) != std::string::npos;
                     });
}

}  // namespace

TEST_CASE("question sets carry 7 attack and 3 evade factor questions") {
  CHECK(QuestionSet::attack().size() == 7);
  CHECK(QuestionSet::evade().size() == 3);
  CHECK(QuestionSet::attack().index_of("A5") == 4);
  CHECK(QuestionSet::evade().index_of("A5") == -1);
}

TEST_CASE("the bundled attack set has the expected shape") {
  const auto attacks = standard_attacks();
  REQUIRE(attacks.size() == 10);
  std::vector<std::size_t> arities;
  for (const auto& a : attacks) arities.push_back(a.arity());
  CHECK(arities == std::vector<std::size_t>{5, 5, 1, 4, 8, 5, 4, 3, 3, 5});

  StudyData data;
  data.catalog = standard_catalog();
  data.attacks = attacks;
  CHECK(data.max_arity() == 8);
  CHECK(data.catalog.size() == 26);

  std::set<ComponentId> referenced;
  for (const auto& a : attacks) {
    referenced.insert(a.components.begin(), a.components.end());
  }
  CHECK(referenced.size() == 26);  // every component appears in some attack
}

TEST_CASE("a generated study validates clean") {
  const StudyData data = small_valid_study(4);
  CHECK(validate_study(data).empty());
  // idempotent and side-effect free
  CHECK(validate_study(data).empty());
}

TEST_CASE("rank sums off by one are reported against the expert") {
  StudyData data = small_valid_study(3);
  auto& ranking = data.experts[1].attack_ranking;
  ranking.begin()->second += 1.0;  // sum is now 56 for 10 attacks
  const auto violations = validate_study(data);
  REQUIRE_FALSE(violations.empty());
  CHECK(has_violation(violations, "expert 2", "rank sum"));
}

TEST_CASE("dangling component references are reported") {
  StudyData data = small_valid_study(2);
  data.attacks[0].components.push_back(27);
  const auto violations = validate_study(data);
  CHECK(has_violation(violations, "attack 1", "component 27"));
}

TEST_CASE("out-of-range and missing ratings are reported") {
  StudyData data = small_valid_study(2);
  data.experts[0].overall_ratings[5] = 101.0;
  data.experts[1].factor_ratings.erase(12);
  const auto violations = validate_study(data);
  CHECK(has_violation(violations, "expert 1", "outside [0,100]"));
  CHECK(has_violation(violations, "expert 2",
                      "missing factor ratings for component 12"));
}

TEST_CASE("missing rank coverage is reported") {
  StudyData data = small_valid_study(2);
  data.experts[0].attack_ranking.erase(7);
  const auto violations = validate_study(data);
  CHECK(has_violation(violations, "expert 1", "missing rank for attack 7"));
}

TEST_CASE("split_experts filters by id parity") {
  const StudyData data = small_valid_study(4);

  const StudyData odd = split_experts(data, SplitScheme::odd);
  REQUIRE(odd.experts.size() == 2);
  CHECK(odd.experts[0].id == 1);
  CHECK(odd.experts[1].id == 3);

  const StudyData all = split_experts(data, SplitScheme::all);
  CHECK(all == data);

  StudyData evens_only = data;
  evens_only.experts.erase(evens_only.experts.begin() + 2);  // drop id 3
  evens_only.experts.erase(evens_only.experts.begin());      // drop id 1
  CHECK_THROWS_AS(split_experts(evens_only, SplitScheme::odd), DataError);
}

TEST_CASE("odd and even groups partition the experts") {
  const StudyData data = small_valid_study(7);
  const StudyData odd = split_experts(data, SplitScheme::odd);
  const StudyData even = split_experts(data, SplitScheme::even);

  std::set<ExpertId> seen;
  for (const auto& e : odd.experts) CHECK(seen.insert(e.id).second);
  for (const auto& e : even.experts) CHECK(seen.insert(e.id).second);
  CHECK(seen.size() == data.experts.size());
  CHECK(odd.attacks == data.attacks);
  CHECK(even.catalog == data.catalog);
}
