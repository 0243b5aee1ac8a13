#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aggfit/domain.hpp"
#include "aggfit/errors.hpp"
#include "aggfit/evolution.hpp"
#include "aggfit/experiments.hpp"
#include "aggfit/io.hpp"
#include "aggfit/reference.hpp"
#include "aggfit/stats.hpp"
#include "aggfit/synthesis.hpp"
#include "aggfit/version.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

namespace cli_detail {

inline WeightVector parse_weights(const std::string& csv_list) {
  std::vector<double> values;
  std::stringstream ss(csv_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("'" + item + "' is not a number in weight list");
    }
  }
  return make_weights(std::move(values));
}

struct CommonEaOptions {
  int generations = 250;
  int population = 250;
  double elitism = 0.01;
  double copy = 0.00;
  double cross = 0.20;
  double mut = 0.79;
  double delta_max = 0.05;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gens", generations, "number of generations");
    cmd->add_option("--pop", population, "population size");
    cmd->add_option("--elitism", elitism, "elitism fraction");
    cmd->add_option("--copy", copy, "copy fraction");
    cmd->add_option("--cross", cross, "crossover fraction");
    cmd->add_option("--mut", mut, "mutation fraction");
    cmd->add_option("--delta-max", delta_max, "largest mutation step");
    cmd->add_option("--seed", seed, "random seed");
  }

  EaConfig to_config(int genome_length) const {
    EaConfig config;
    config.generations = generations;
    config.population = population;
    config.elitism_fraction = elitism;
    config.copy_fraction = copy;
    config.crossover_fraction = cross;
    config.mutation_fraction = mut;
    config.genome_length = genome_length;
    config.mutation_delta_max = delta_max;
    config.seed = seed;
    return config;
  }
};

inline std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '-') c = '_';
  }
  return s;
}

}  // namespace cli_detail

// Command-line entry point. Exit codes: 0 success, 1 usage error (bad flags,
// invalid configuration), 2 data error (unreadable or invalid study data).
inline int cli_dispatch(int argc, const char* const* argv) {
  using cli_detail::CommonEaOptions;
  using cli_detail::parse_weights;
  using cli_detail::sanitize;

  CLI::App app{"weight-learning toolkit for expert assessment aggregation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "read defaults from an INI/TOML file");
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic study with planted operators");
  const SynthParams synth_defaults;
  struct {
    std::string out;
    int experts = 20;
    double factor_noise = 0.0;
    double rank_noise = 0.0;
    std::uint64_t seed = 0;
    std::string owa, wa_attack, wa_evade;
  } synth_opt;
  synth_opt.factor_noise = synth_defaults.factor_noise_sigma;
  synth_opt.rank_noise = synth_defaults.ranking_noise_sigma;
  synth->add_option("--out", synth_opt.out, "output directory")->required();
  synth->add_option("--experts", synth_opt.experts, "number of experts");
  synth->add_option("--factor-noise", synth_opt.factor_noise,
                    "factor rating noise sigma");
  synth->add_option("--rank-noise", synth_opt.rank_noise,
                    "attack score noise sigma");
  synth->add_option("--seed", synth_opt.seed, "random seed");
  synth->add_option("--owa", synth_opt.owa, "planted ordered weights");
  synth->add_option("--wa-attack", synth_opt.wa_attack,
                    "planted attack-category source weights");
  synth->add_option("--wa-evade", synth_opt.wa_evade,
                    "planted evade-category source weights");

  // ---- train-owa ----
  auto* train_owa = app.add_subcommand(
      "train-owa", "evolve ordered weights against attack rankings");
  struct {
    std::string data;
    std::string out = ".";
    std::string group = "all";
    CommonEaOptions ea;
  } towa_opt;
  train_owa->add_option("--data", towa_opt.data, "study directory")->required();
  train_owa->add_option("--out", towa_opt.out, "report directory");
  train_owa->add_option("--group", towa_opt.group, "expert group (odd|even|all)");
  towa_opt.ea.attach(train_owa);

  // ---- train-wa ----
  auto* train_wa = app.add_subcommand(
      "train-wa", "evolve source weights against overall component ratings");
  struct {
    std::string data;
    std::string out = ".";
    std::string group = "all";
    std::string category;
    std::string wa_error = "mean";
    CommonEaOptions ea;
  } twa_opt;
  train_wa->add_option("--data", twa_opt.data, "study directory")->required();
  train_wa->add_option("--out", twa_opt.out, "report directory");
  train_wa->add_option("--group", twa_opt.group, "expert group (odd|even|all)");
  train_wa->add_option("--category", twa_opt.category,
                       "component category (attack|evade)")
      ->required();
  train_wa->add_option("--wa-error", twa_opt.wa_error,
                       "per-expert error: mean|sum of absolute differences");
  twa_opt.ea.attach(train_wa);

  // ---- sweep ----
  auto* sweep = app.add_subcommand(
      "sweep", "run a built-in configuration sweep");
  struct {
    std::string data;
    std::string out = ".";
    std::string plan;
    std::string track;
    std::string group = "all";
    std::string wa_error = "mean";
    std::uint64_t seed = 0;
  } sweep_opt;
  sweep->add_option("--data", sweep_opt.data, "study directory")->required();
  sweep->add_option("--out", sweep_opt.out, "report directory");
  sweep->add_option("--plan", sweep_opt.plan, "plan (proportions|popgen)")
      ->required();
  sweep->add_option("--track", sweep_opt.track,
                    "track (owa|wa-attack|wa-evade)")
      ->required();
  sweep->add_option("--group", sweep_opt.group, "expert group (odd|even|all)");
  sweep->add_option("--wa-error", sweep_opt.wa_error, "mean|sum");
  sweep->add_option("--seed", sweep_opt.seed, "base seed for row seeds");

  // ---- robustness ----
  auto* robustness = app.add_subcommand(
      "robustness", "train on one parity group, evaluate on the other");
  struct {
    std::string data;
    std::string out = ".";
    std::string train_group;
    CommonEaOptions ea;
  } rob_opt;
  robustness->add_option("--data", rob_opt.data, "study directory")->required();
  robustness->add_option("--out", rob_opt.out, "report directory");
  robustness
      ->add_option("--train-group", rob_opt.train_group,
                   "training group (odd|even)")
      ->required();
  rob_opt.ea.attach(robustness);

  // ---- extended ----
  auto* extended = app.add_subcommand(
      "extended", "repeat one configuration across consecutive seeds");
  struct {
    std::string data;
    std::string out = ".";
    std::string track;
    std::string group = "all";
    std::string wa_error = "mean";
    int seeds = 30;
    CommonEaOptions ea;
  } ext_opt;
  extended->add_option("--data", ext_opt.data, "study directory")->required();
  extended->add_option("--out", ext_opt.out, "report directory");
  extended->add_option("--track", ext_opt.track,
                       "track (owa|wa-attack|wa-evade)")
      ->required();
  extended->add_option("--group", ext_opt.group, "expert group (odd|even|all)");
  extended->add_option("--wa-error", ext_opt.wa_error, "mean|sum");
  extended->add_option("--seeds", ext_opt.seeds, "number of seeds");
  ext_opt.ea.attach(extended);

  // ---- chain ----
  auto* chain = app.add_subcommand(
      "chain", "two-stage pipeline from factor ratings to attack rankings");
  struct {
    std::string data;
    std::string out = ".";
    std::string owa, wa_attack, wa_evade;
  } chain_opt;
  chain->add_option("--data", chain_opt.data, "study directory")->required();
  chain->add_option("--out", chain_opt.out, "report directory");
  chain->add_option("--owa", chain_opt.owa, "ordered weights");
  chain->add_option("--wa-attack", chain_opt.wa_attack,
                    "attack-category source weights");
  chain->add_option("--wa-evade", chain_opt.wa_evade,
                    "evade-category source weights");

  // ---- eval ----
  auto* eval = app.add_subcommand(
      "eval", "apply given ordered weights to one expert's ratings");
  struct {
    std::string data;
    std::string owa;
    int expert = 0;  // 0 = lowest expert id
    int attack = 0;  // 0 = all attacks
  } eval_opt;
  eval->add_option("--data", eval_opt.data, "study directory")->required();
  eval->add_option("--owa", eval_opt.owa, "ordered weights")->required();
  eval->add_option("--expert", eval_opt.expert, "expert id (default: first)");
  eval->add_option("--attack", eval_opt.attack, "attack id (default: all)");

  // ---- validate ----
  auto* validate_cmd = app.add_subcommand(
      "validate", "check a study directory against all data invariants");
  struct {
    std::string data;
  } val_opt;
  validate_cmd->add_option("--data", val_opt.data, "study directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (synth->parsed()) {
      SynthParams params;
      params.n_experts = synth_opt.experts;
      params.factor_noise_sigma = synth_opt.factor_noise;
      params.ranking_noise_sigma = synth_opt.rank_noise;
      params.seed = synth_opt.seed;
      if (!synth_opt.owa.empty()) params.planted_owa = parse_weights(synth_opt.owa);
      if (!synth_opt.wa_attack.empty()) {
        params.planted_wa_attack = parse_weights(synth_opt.wa_attack);
      }
      if (!synth_opt.wa_evade.empty()) {
        params.planted_wa_evade = parse_weights(synth_opt.wa_evade);
      }
      const StudyData data = generate_standard_study(params);
      emit_study(synth_opt.out, data);
      std::cout << "wrote " << data.experts.size() << " experts to "
                << synth_opt.out << '\n';
      return 0;
    }

    if (train_owa->parsed()) {
      const StudyData data = split_experts(load_study(towa_opt.data),
                                           split_scheme_from_string(towa_opt.group));
      const EaConfig config =
          towa_opt.ea.to_config(static_cast<int>(data.max_arity()));
      validate(config);
      const EvolutionResult result = evolve(config, OwaFitness(data));
      json body = to_json(result);
      body["group"] = towa_opt.group;
      const auto path =
          std::filesystem::path(towa_opt.out) / "train_owa.json";
      write_json(path, make_report("train-owa", std::move(body)));
      std::cout << "best mse " << format_double(result.best_fitness.mse)
                << ", mean spearman "
                << format_double(result.best_fitness.mean_correlation)
                << " -> " << path.string() << '\n';
      return 0;
    }

    if (train_wa->parsed()) {
      const Category category = [&] {
        if (twa_opt.category == "attack") return Category::attack;
        if (twa_opt.category == "evade") return Category::evade;
        throw std::invalid_argument("unknown category '" + twa_opt.category +
                                    "' (expected attack|evade)");
      }();
      const WaErrorMode mode = wa_error_mode_from_string(twa_opt.wa_error);
      const StudyData data = split_experts(load_study(twa_opt.data),
                                           split_scheme_from_string(twa_opt.group));
      const WaFitness fitness(data, category, mode);
      const EaConfig config =
          twa_opt.ea.to_config(static_cast<int>(fitness.genome_length()));
      validate(config);
      const EvolutionResult result = evolve(config, fitness);
      json body = to_json(result);
      body["group"] = twa_opt.group;
      body["category"] = to_string(category);
      body["wa_error"] = to_string(mode);
      const auto path = std::filesystem::path(twa_opt.out) /
                        ("train_wa_" + std::string(to_string(category)) + ".json");
      write_json(path, make_report("train-wa", std::move(body)));
      std::cout << "best mse " << format_double(result.best_fitness.mse)
                << ", mean spearman "
                << format_double(result.best_fitness.mean_correlation)
                << " -> " << path.string() << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      const Track track = track_from_string(sweep_opt.track);
      const SplitScheme group = split_scheme_from_string(sweep_opt.group);
      const WaErrorMode mode = wa_error_mode_from_string(sweep_opt.wa_error);
      const StudyData data = load_study(sweep_opt.data);
      const SweepPlan plan = built_in_plan(sweep_opt.plan, track, group,
                                           track_genome_length(track, data));
      const SweepReport report = run_sweep(plan, data, sweep_opt.seed, mode);
      json body = to_json(report);
      body["plan"] = sweep_opt.plan;
      body["base_seed"] = sweep_opt.seed;
      const std::string stem = "sweep_" + sweep_opt.plan + "_" +
                               sanitize(sweep_opt.track) + "_" +
                               sweep_opt.group;
      const auto dir = std::filesystem::path(sweep_opt.out);
      write_json(dir / (stem + ".json"), make_report("sweep", std::move(body)));
      write_sweep_csv(dir / (stem + ".csv"), report);
      std::cout << "best test " << report.rows[report.best_row].test_id
                << " mse "
                << format_double(report.rows[report.best_row].mse) << " -> "
                << (dir / (stem + ".json")).string() << '\n';
      return 0;
    }

    if (robustness->parsed()) {
      const SplitScheme train_group =
          split_scheme_from_string(rob_opt.train_group);
      const StudyData data = load_study(rob_opt.data);
      const StudyData train_data = split_experts(data, train_group);
      const EaConfig config =
          rob_opt.ea.to_config(static_cast<int>(train_data.max_arity()));
      validate(config);
      const EvolutionResult result = evolve(config, OwaFitness(train_data));
      const FitnessReport transfer =
          cross_group_robustness(result.best, train_group, data);
      json body;
      body["train_group"] = rob_opt.train_group;
      body["config"] = to_json(config);
      body["best"] = to_json(result.best);
      body["train_fitness"] = to_json(result.best_fitness);
      body["transfer_fitness"] = to_json(transfer);
      body["correlation_degradation"] =
          result.best_fitness.mean_correlation - transfer.mean_correlation;
      const auto path = std::filesystem::path(rob_opt.out) /
                        ("robustness_" + rob_opt.train_group + ".json");
      write_json(path, make_report("robustness", std::move(body)));
      std::cout << "train spearman "
                << format_double(result.best_fitness.mean_correlation)
                << ", transfer spearman "
                << format_double(transfer.mean_correlation) << " -> "
                << path.string() << '\n';
      return 0;
    }

    if (extended->parsed()) {
      const Track track = track_from_string(ext_opt.track);
      const SplitScheme group = split_scheme_from_string(ext_opt.group);
      const WaErrorMode mode = wa_error_mode_from_string(ext_opt.wa_error);
      const StudyData data =
          split_experts(load_study(ext_opt.data), group);
      const EaConfig config =
          ext_opt.ea.to_config(track_genome_length(track, data));
      validate(config);
      const ExtendedSummary summary =
          extended_runs(config, track, data, ext_opt.seeds, mode);
      json body = to_json(summary);
      body["track"] = ext_opt.track;
      body["group"] = ext_opt.group;
      body["config"] = to_json(config);
      body["seeds"] = ext_opt.seeds;
      const std::string stem = "extended_" + sanitize(ext_opt.track);
      const auto dir = std::filesystem::path(ext_opt.out);
      const auto path = dir / (stem + ".json");
      write_json(path, make_report("extended", std::move(body)));
      write_extended_csv(dir / (stem + ".csv"), summary);
      std::cout << "mse mean " << format_double(summary.mse.mean) << " std "
                << format_double(summary.mse.std_dev) << " -> "
                << path.string() << '\n';
      return 0;
    }

    if (chain->parsed()) {
      const StudyData data = load_study(chain_opt.data);
      const WeightVector owa = chain_opt.owa.empty()
                                   ? reference_owa()
                                   : parse_weights(chain_opt.owa);
      const WeightVector wa_attack = chain_opt.wa_attack.empty()
                                         ? reference_wa_attack()
                                         : parse_weights(chain_opt.wa_attack);
      const WeightVector wa_evade = chain_opt.wa_evade.empty()
                                        ? reference_wa_evade()
                                        : parse_weights(chain_opt.wa_evade);
      const FitnessReport report =
          chained_pipeline(wa_attack, wa_evade, owa, data);
      json body;
      body["owa"] = to_json(owa);
      body["wa_attack"] = to_json(wa_attack);
      body["wa_evade"] = to_json(wa_evade);
      body["fitness"] = to_json(report);
      const auto path = std::filesystem::path(chain_opt.out) / "chain.json";
      write_json(path, make_report("chain", std::move(body)));
      std::cout << "mean spearman " << format_double(report.mean_correlation)
                << " -> " << path.string() << '\n';
      return 0;
    }

    if (eval->parsed()) {
      const StudyData data = load_study(eval_opt.data);
      const WeightVector owa = parse_weights(eval_opt.owa);
      const ExpertDataset* expert = nullptr;
      for (const auto& e : data.experts) {
        if (eval_opt.expert == 0 || e.id == eval_opt.expert) {
          expert = &e;
          break;
        }
      }
      if (expert == nullptr) {
        throw DataError("expert " + std::to_string(eval_opt.expert) +
                        " not in study");
      }
      bool found = false;
      for (const auto& attack : data.attacks) {
        if (eval_opt.attack != 0 && attack.id != eval_opt.attack) continue;
        found = true;
        const double score =
            rate_attack(attack, expert->overall_ratings, owa);
        if (eval_opt.attack != 0) {
          std::cout << format_fixed(score, 2) << '\n';
        } else {
          std::cout << "attack " << attack.id << ": "
                    << format_fixed(score, 2) << '\n';
        }
      }
      if (!found) {
        throw DataError("attack " + std::to_string(eval_opt.attack) +
                        " not in study");
      }
      return 0;
    }

    if (validate_cmd->parsed()) {
      // load_study validates internally; report its findings instead of
      // treating them as a hard failure
      StudyData data;
      try {
        data = load_study(val_opt.data);
      } catch (const DataError& e) {
        std::cout << e.what() << '\n';
        return 2;
      }
      std::cout << "ok: " << data.attacks.size() << " attacks, "
                << data.catalog.size() << " components, "
                << data.experts.size() << " experts\n";
      return 0;
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

inline int cli_dispatch(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("aggfit");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& a : full) argv.push_back(a.c_str());
  return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace aggfit
