#include "aggfit/experiments.hpp"

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "aggfit/reference.hpp"
#include "aggfit/synthesis.hpp"
#include "test_helpers.hpp"

using namespace aggfit;
using Catch::Approx;

namespace {

StudyData noiseless_study(int n_experts, std::uint64_t seed) {
  SynthParams params = noiseless_params();
  params.n_experts = n_experts;
  params.seed = seed;
  return generate_standard_study(params);
}

}  // namespace

TEST_CASE("built-in plans mirror the published sweep schedules") {
  const SweepPlan proportions =
      proportions_plan(Track::owa, SplitScheme::all, 8);
  REQUIRE(proportions.rows.size() == 10);
  CHECK(proportions.rows.front().test_id == 1);
  CHECK(proportions.rows.front().config.copy_fraction == 0.00);
  CHECK(proportions.rows.front().config.crossover_fraction == 0.20);
  CHECK(proportions.rows.front().config.mutation_fraction == 0.79);
  CHECK(proportions.rows.back().test_id == 10);
  CHECK(proportions.rows.back().config.crossover_fraction == 0.99);
  for (const auto& row : proportions.rows) {
    CHECK(row.config.population == 250);
    CHECK(row.config.generations == 250);
    CHECK(row.config.elitism_fraction == 0.01);
    CHECK_NOTHROW(validate(row.config));
  }

  const SweepPlan popgen = popgen_plan(Track::owa, SplitScheme::all, 8);
  REQUIRE(popgen.rows.size() == 6);
  const std::vector<std::pair<int, int>> expected{
      {50, 1250}, {100, 625}, {200, 315}, {300, 210}, {400, 155}, {500, 125}};
  for (std::size_t i = 0; i < popgen.rows.size(); ++i) {
    CHECK(popgen.rows[i].test_id == static_cast<int>(11 + i));
    CHECK(popgen.rows[i].config.generations == expected[i].first);
    CHECK(popgen.rows[i].config.population == expected[i].second);
    CHECK_NOTHROW(validate(popgen.rows[i].config));
  }

  CHECK_THROWS_AS(built_in_plan("nope", Track::owa, SplitScheme::all, 8),
                  std::invalid_argument);
}

TEST_CASE("every proportions row solves noiseless planted data") {
  const StudyData data = noiseless_study(8, 60);
  const SweepPlan plan = proportions_plan(Track::owa, SplitScheme::all, 8);
  const SweepReport report = run_sweep(plan, data, 77);
  REQUIRE(report.rows.size() == 10);
  for (const auto& row : report.rows) {
    INFO("test id " << row.test_id);
    CHECK(row.mse <= 0.01);
  }
  CHECK(report.rows[report.best_row].mse <= 0.01);
}

TEST_CASE("a single-row sweep equals one evolve call with the derived seed") {
  const StudyData data = noiseless_study(6, 50);

  SweepPlan plan;
  plan.track = Track::owa;
  plan.group = SplitScheme::all;
  EaConfig config;
  config.generations = 40;
  config.population = 50;
  config.genome_length = 8;
  plan.rows.push_back({4, config});

  const SweepReport report = run_sweep(plan, data, 900);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.best_row == 0);

  EaConfig direct = config;
  direct.seed = mix_seed(900, 4);
  const EvolutionResult expected = evolve(direct, OwaFitness(data));
  CHECK(report.rows[0].best.values == expected.best.values);
  CHECK(report.rows[0].mse == expected.best_fitness.mse);
  CHECK(report.rows[0].mean_correlation ==
        expected.best_fitness.mean_correlation);
}

TEST_CASE("sweeps are reproducible and deterministic") {
  const StudyData data = noiseless_study(4, 51);
  SweepPlan plan = popgen_plan(Track::wa_evade, SplitScheme::all, 3);
  for (auto& row : plan.rows) {  // shrink for test speed
    row.config.generations = 15;
    row.config.population = 30;
  }
  const SweepReport a = run_sweep(plan, data, 7);
  const SweepReport b = run_sweep(plan, data, 7);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].best.values == b.rows[i].best.values);
    CHECK(a.rows[i].mse == b.rows[i].mse);
  }
  CHECK(a.best_row == b.best_row);
  const auto min_it = std::min_element(
      a.rows.begin(), a.rows.end(),
      [](const auto& lhs, const auto& rhs) { return lhs.mse < rhs.mse; });
  CHECK(a.rows[a.best_row].mse == min_it->mse);
}

TEST_CASE("sweep rejects rows whose genome length contradicts the track") {
  const StudyData data = noiseless_study(3, 52);
  SweepPlan plan = proportions_plan(Track::owa, SplitScheme::all, 5);
  CHECK_THROWS_AS(run_sweep(plan, data, 1), std::invalid_argument);
}

TEST_CASE("planted ordered weights transfer perfectly on noiseless data") {
  const StudyData data = noiseless_study(6, 53);
  const SynthParams params = noiseless_params();  // planted defaults generated the data
  const FitnessReport transfer =
      cross_group_robustness(params.planted_owa, SplitScheme::odd, data);
  CHECK(transfer.mean_correlation == Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(
      cross_group_robustness(params.planted_owa, SplitScheme::all, data),
      std::invalid_argument);
}

TEST_CASE("extended runs summarize per-seed bests") {
  const StudyData data = noiseless_study(5, 54);
  EaConfig config;
  config.generations = 25;
  config.population = 40;
  config.genome_length = 8;
  config.seed = 1000;

  const ExtendedSummary summary =
      extended_runs(config, Track::owa, data, 3);
  REQUIRE(summary.per_seed_mse.size() == 3);
  REQUIRE(summary.per_seed_best.size() == 3);
  CHECK(summary.all_histories_monotone);
  CHECK(summary.mse.min <= summary.mse.mean);
  CHECK(summary.mse.mean <= summary.mse.max);
  CHECK(summary.mse.std_dev >= 0.0);
  // distinct seeds explore distinct paths
  CHECK(summary.per_seed_best[0].values != summary.per_seed_best[1].values);

  CHECK_THROWS_AS(extended_runs(config, Track::owa, data, 1),
                  std::invalid_argument);
}

TEST_CASE("chained pipeline inverts the noiseless generator exactly") {
  const StudyData data = noiseless_study(7, 55);
  const SynthParams params = noiseless_params();
  const FitnessReport report =
      chained_pipeline(params.planted_wa_attack, params.planted_wa_evade,
                       params.planted_owa, data);
  CHECK(report.mean_correlation == Approx(1.0).margin(1e-12));
  CHECK(report.mse == Approx(0.0).margin(1e-12));
}

TEST_CASE("chained error is one minus correlation by definition") {
  SynthParams params = noiseless_params();
  params.n_experts = 9;
  params.factor_noise_sigma = 8.0;
  params.ranking_noise_sigma = 3.0;
  params.seed = 56;
  const StudyData data = generate_standard_study(params);
  const FitnessReport report =
      chained_pipeline(params.planted_wa_attack, params.planted_wa_evade,
                       params.planted_owa, data);
  for (const auto& e : report.per_expert) {
    CHECK(e.error == Approx(1.0 - e.correlation).margin(1e-15));
  }
}

TEST_CASE("chained pipeline validates operator lengths") {
  const StudyData data = noiseless_study(2, 57);
  const SynthParams params = noiseless_params();
  CHECK_THROWS_AS(
      chained_pipeline(test::uniform_weights(5), params.planted_wa_evade,
                       params.planted_owa, data),
      std::invalid_argument);
  CHECK_THROWS_AS(
      chained_pipeline(params.planted_wa_attack, params.planted_wa_evade,
                       test::uniform_weights(4), data),
      std::invalid_argument);
}

TEST_CASE("the reference card carries the published documentation targets") {
  const auto& card = reference_card();
  auto lookup = [&card](const std::string& experiment,
                        const std::string& metric) {
    for (const auto& e : card) {
      if (experiment == e.experiment && metric == e.metric) return e.value;
    }
    FAIL("missing reference entry " + experiment + "/" + metric);
    return 0.0;
  };
  CHECK(lookup("owa_config_best_all", "mean_spearman") == 0.6159);
  CHECK(lookup("owa_config_best_all", "mse") == 0.2069);
  CHECK(lookup("owa_robustness_even_trained_on_odd", "mean_spearman") ==
        0.5228);
  CHECK(lookup("owa_robustness_even_trained_on_odd", "mse") == 0.3013);
  CHECK(lookup("owa_extended_30_runs", "mse_std") == 0.0020);
  CHECK(lookup("chained_factor_to_ranking", "spearman_mean") == 0.5562);
  CHECK(lookup("chained_factor_to_ranking", "spearman_max") == 0.9636);
  CHECK(lookup("chained_factor_to_ranking", "spearman_min") == -0.4303);
  CHECK(lookup("wa_config_best_attack", "mse") == 194.0125);
  CHECK(lookup("wa_config_best_evade", "mse") == 420.2156);
}
