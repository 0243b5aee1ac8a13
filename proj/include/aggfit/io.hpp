#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "aggfit/domain.hpp"
#include "aggfit/errors.hpp"
#include "aggfit/evolution.hpp"
#include "aggfit/experiments.hpp"
#include "aggfit/reference.hpp"
#include "aggfit/stats.hpp"
#include "aggfit/version.hpp"
#include "aggfit/weights.hpp"

namespace aggfit {

// Shortest decimal form that parses back to the identical double; keeps CSV
// round trips exact and report files byte-stable.
inline std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double value, int decimals) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << value;
  return os.str();
}

namespace csv {

struct Table {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // row i is file line i+2
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

inline Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Table table;
  table.path = path;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path.string() + ": empty file, header row required");
  }
  table.header = split_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      std::to_string(fields.size()) + " fields, " +
                      std::to_string(table.header.size()) + " expected");
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

inline void expect_header(const Table& table,
                          const std::vector<std::string>& expected) {
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) {
      if (!want.empty()) want += ',';
      want += h;
    }
    throw DataError(table.path.string() + ": header must be '" + want + "'");
  }
}

inline double parse_double(const Table& table, std::size_t row,
                           std::size_t col) {
  const std::string& s = table.rows[row][col];
  double value = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(table.path.string() + ":" + std::to_string(row + 2) +
                    ": '" + s + "' is not a number");
  }
  return value;
}

inline int parse_int(const Table& table, std::size_t row, std::size_t col) {
  const std::string& s = table.rows[row][col];
  int value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(table.path.string() + ":" + std::to_string(row + 2) +
                    ": '" + s + "' is not an integer");
  }
  return value;
}

}  // namespace csv

// Study directory layout. All files are UTF-8 CSV with a header row and '.'
// as the decimal separator:
//   components.csv       component_id,category
//   attacks.csv          attack_id,position,component_id   (position 1-based)
//   overall_ratings.csv  expert_id,component_id,rating
//   factor_ratings.csv   expert_id,component_id,question_id,rating
//   rankings.csv         expert_id,attack_id,rank
inline StudyData load_study(const std::filesystem::path& dir) {
  StudyData data;

  {
    auto table = csv::read(dir / "components.csv");
    csv::expect_header(table, {"component_id", "category"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const ComponentId id = csv::parse_int(table, r, 0);
      if (data.catalog.entries.count(id)) {
        throw DataError(table.path.string() + ":" + std::to_string(r + 2) +
                        ": duplicate component " + std::to_string(id));
      }
      data.catalog.entries[id] = category_from_string(table.rows[r][1]);
    }
  }

  {
    auto table = csv::read(dir / "attacks.csv");
    csv::expect_header(table, {"attack_id", "position", "component_id"});
    std::map<AttackId, std::map<int, ComponentId>> by_attack;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const AttackId attack = csv::parse_int(table, r, 0);
      const int position = csv::parse_int(table, r, 1);
      const ComponentId comp = csv::parse_int(table, r, 2);
      if (!by_attack[attack].emplace(position, comp).second) {
        throw DataError(table.path.string() + ":" + std::to_string(r + 2) +
                        ": duplicate position " + std::to_string(position) +
                        " in attack " + std::to_string(attack));
      }
    }
    for (const auto& [attack_id, positions] : by_attack) {
      AttackSpec spec;
      spec.id = attack_id;
      int expected = 1;
      for (const auto& [position, comp] : positions) {
        if (position != expected) {
          throw DataError(dir.string() + "/attacks.csv: attack " +
                          std::to_string(attack_id) +
                          " positions are not contiguous from 1");
        }
        spec.components.push_back(comp);
        ++expected;
      }
      data.attacks.push_back(std::move(spec));
    }
  }

  std::map<ExpertId, ExpertDataset> experts;
  {
    auto table = csv::read(dir / "overall_ratings.csv");
    csv::expect_header(table, {"expert_id", "component_id", "rating"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const ExpertId expert = csv::parse_int(table, r, 0);
      const ComponentId comp = csv::parse_int(table, r, 1);
      experts[expert].overall_ratings[comp] = csv::parse_double(table, r, 2);
    }
  }
  {
    auto table = csv::read(dir / "factor_ratings.csv");
    csv::expect_header(table,
                       {"expert_id", "component_id", "question_id", "rating"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const ExpertId expert = csv::parse_int(table, r, 0);
      const ComponentId comp = csv::parse_int(table, r, 1);
      const std::string& qid = table.rows[r][2];
      if (!data.catalog.contains(comp)) {
        throw DataError(table.path.string() + ":" + std::to_string(r + 2) +
                        ": component " + std::to_string(comp) +
                        " not in catalog");
      }
      const QuestionSet& qs =
          QuestionSet::for_category(data.catalog.category_of(comp));
      const int index = qs.index_of(qid);
      if (index < 0) {
        throw DataError(table.path.string() + ":" + std::to_string(r + 2) +
                        ": question '" + qid + "' not in the " +
                        to_string(qs.category) + " question set");
      }
      auto& factors = experts[expert].factor_ratings[comp];
      factors.resize(qs.size(), std::numeric_limits<double>::quiet_NaN());
      factors[static_cast<std::size_t>(index)] =
          csv::parse_double(table, r, 3);
    }
  }
  {
    auto table = csv::read(dir / "rankings.csv");
    csv::expect_header(table, {"expert_id", "attack_id", "rank"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const ExpertId expert = csv::parse_int(table, r, 0);
      const AttackId attack = csv::parse_int(table, r, 1);
      experts[expert].attack_ranking[attack] = csv::parse_double(table, r, 2);
    }
  }

  for (auto& [id, expert] : experts) {
    expert.id = id;
    data.experts.push_back(std::move(expert));
  }

  const auto violations = validate_study(data);
  if (!violations.empty()) {
    std::string message = dir.string() + ": study failed validation:";
    for (const auto& v : violations) {
      message += "\n  " + v.entity + ": " + v.rule;
    }
    throw DataError(message);
  }
  return data;
}

// Inverse of load_study; emits the five CSVs with deterministic ordering and
// shortest-round-trip numbers, so emit/load is a field-for-field identity.
inline void emit_study(const std::filesystem::path& dir,
                       const StudyData& data) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("components.csv");
    out << "component_id,category\n";
    for (const auto& [id, cat] : data.catalog.entries) {
      out << id << ',' << to_string(cat) << '\n';
    }
  }
  {
    auto out = open("attacks.csv");
    out << "attack_id,position,component_id\n";
    for (const auto& attack : data.attacks) {
      for (std::size_t p = 0; p < attack.components.size(); ++p) {
        out << attack.id << ',' << (p + 1) << ',' << attack.components[p]
            << '\n';
      }
    }
  }
  {
    auto out = open("overall_ratings.csv");
    out << "expert_id,component_id,rating\n";
    for (const auto& expert : data.experts) {
      for (const auto& [comp, rating] : expert.overall_ratings) {
        out << expert.id << ',' << comp << ',' << format_double(rating)
            << '\n';
      }
    }
  }
  {
    auto out = open("factor_ratings.csv");
    out << "expert_id,component_id,question_id,rating\n";
    for (const auto& expert : data.experts) {
      for (const auto& [comp, factors] : expert.factor_ratings) {
        const QuestionSet& qs =
            QuestionSet::for_category(data.catalog.category_of(comp));
        for (std::size_t q = 0; q < factors.size(); ++q) {
          out << expert.id << ',' << comp << ',' << qs.questions[q].id << ','
              << format_double(factors[q]) << '\n';
        }
      }
    }
  }
  {
    auto out = open("rankings.csv");
    out << "expert_id,attack_id,rank\n";
    for (const auto& expert : data.experts) {
      for (const auto& [attack, rank] : expert.attack_ranking) {
        out << expert.id << ',' << attack << ',' << format_double(rank)
            << '\n';
      }
    }
  }
}

// ---- JSON report building ----
//
// Reports carry a config echo, the library version, the result metrics and
// the reference card. Weight vectors appear at full precision plus a
// four-decimal display form.

using json = nlohmann::ordered_json;

inline json to_json(const WeightVector& w) {
  json values = json::array();
  json display = json::array();
  for (double v : w.values) {
    values.push_back(v);
    display.push_back(format_fixed(v, 4));
  }
  return json{{"values", values}, {"display", display}};
}

inline json to_json(const EaConfig& c) {
  return json{{"generations", c.generations},
              {"population", c.population},
              {"elitism_fraction", c.elitism_fraction},
              {"copy_fraction", c.copy_fraction},
              {"crossover_fraction", c.crossover_fraction},
              {"mutation_fraction", c.mutation_fraction},
              {"genome_length", c.genome_length},
              {"mutation_delta_max", c.mutation_delta_max},
              {"seed", c.seed}};
}

inline json to_json(const FitnessReport& r) {
  json per_expert = json::array();
  for (const auto& e : r.per_expert) {
    per_expert.push_back(json{{"expert_id", e.expert_id},
                              {"correlation", e.correlation},
                              {"error", e.error}});
  }
  return json{{"mse", r.mse},
              {"mean_correlation", r.mean_correlation},
              {"per_expert", per_expert}};
}

inline json to_json(const EvolutionResult& r) {
  json history = json::array();
  for (const auto& g : r.history) {
    history.push_back(json{{"best_mse", g.best_mse}, {"mean_mse", g.mean_mse}});
  }
  return json{{"config", to_json(r.config)},
              {"best", to_json(r.best)},
              {"best_fitness", to_json(r.best_fitness)},
              {"history", history}};
}

inline json to_json(const SummaryStats& s) {
  return json{
      {"max", s.max}, {"min", s.min}, {"mean", s.mean}, {"std", s.std_dev}};
}

inline json to_json(const SweepReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"test_id", row.test_id},
                        {"mean_correlation", row.mean_correlation},
                        {"mse", row.mse},
                        {"best", to_json(row.best)}});
  }
  return json{{"track", to_string(r.track)},
              {"group", to_string(r.group)},
              {"rows", rows},
              {"best_test_id", r.rows[r.best_row].test_id}};
}

inline json to_json(const ExtendedSummary& s) {
  json bests = json::array();
  for (const auto& b : s.per_seed_best) bests.push_back(to_json(b));
  return json{{"correlation", to_json(s.correlation)},
              {"mse", to_json(s.mse)},
              {"per_seed_correlation", s.per_seed_correlation},
              {"per_seed_mse", s.per_seed_mse},
              {"per_seed_best", bests},
              {"all_histories_monotone", s.all_histories_monotone}};
}

// Published results for the original expert study; flagged non-reproducible
// because the underlying responses were never released.
inline json reference_card_json() {
  json entries = json::array();
  for (const auto& e : reference_card()) {
    entries.push_back(json{
        {"experiment", e.experiment}, {"metric", e.metric}, {"value", e.value}});
  }
  return json{{"reproducible", false},
              {"note", "results reported for the original expert study; the "
                       "raw responses are unpublished, so these are display "
                       "targets only"},
              {"entries", entries}};
}

inline json make_report(const std::string& command, json body) {
  json report;
  report["version"] = kVersion;
  report["command"] = command;
  report["result"] = std::move(body);
  report["reference_card"] = reference_card_json();
  return report;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Sweep rows as CSV for spreadsheet use.
inline void write_sweep_csv(const std::filesystem::path& path,
                            const SweepReport& report) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "test_id,mean_correlation,mse";
  const std::size_t width =
      report.rows.empty() ? 0 : report.rows.front().best.size();
  for (std::size_t i = 1; i <= width; ++i) out << ",w" << i;
  out << '\n';
  for (const auto& row : report.rows) {
    out << row.test_id << ',' << format_double(row.mean_correlation) << ','
        << format_double(row.mse);
    for (double w : row.best.values) out << ',' << format_double(w);
    out << '\n';
  }
}

// Per-seed rows of an extended-run summary.
inline void write_extended_csv(const std::filesystem::path& path,
                               const ExtendedSummary& summary) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "seed_index,mean_correlation,mse";
  const std::size_t width =
      summary.per_seed_best.empty() ? 0 : summary.per_seed_best.front().size();
  for (std::size_t i = 1; i <= width; ++i) out << ",w" << i;
  out << '\n';
  for (std::size_t s = 0; s < summary.per_seed_mse.size(); ++s) {
    out << s << ',' << format_double(summary.per_seed_correlation[s]) << ','
        << format_double(summary.per_seed_mse[s]);
    for (double w : summary.per_seed_best[s].values) {
      out << ',' << format_double(w);
    }
    out << '\n';
  }
}

}  // namespace aggfit
