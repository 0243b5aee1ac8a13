#include "aggfit/io.hpp"

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <sstream>
#include <string>

#include "aggfit/cli.hpp"
#include "aggfit/synthesis.hpp"
#include "test_helpers.hpp"

using namespace aggfit;
using aggfit::test::fixture_dir;
using aggfit::test::scratch_dir;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void patch_line(const std::filesystem::path& path, const std::string& from,
                const std::string& to) {
  std::string text = slurp(path);
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  text.replace(at, from.size(), to);
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Captures stdout produced by a callback.
template <typename Fn>
std::pair<int, std::string> capture_stdout(Fn&& fn) {
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  int code = -1;
  try {
    code = fn();
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  return {code, captured.str()};
}

}  // namespace

TEST_CASE("emit and load round-trip a study field for field") {
  SynthParams params = noiseless_params();
  params.n_experts = 5;
  params.factor_noise_sigma = 4.5;
  params.ranking_noise_sigma = 1.5;
  params.seed = 31;
  const StudyData data = generate_standard_study(params);

  const auto dir = scratch_dir("roundtrip");
  emit_study(dir, data);
  const StudyData loaded = load_study(dir);
  CHECK(loaded == data);

  // emitted bytes are stable
  const std::string first = slurp(dir / "factor_ratings.csv");
  emit_study(dir, loaded);
  CHECK(slurp(dir / "factor_ratings.csv") == first);
}

TEST_CASE("the bundled fixture loads as a valid study") {
  const StudyData data = load_study(fixture_dir());
  CHECK(data.attacks.size() == 10);
  CHECK(data.catalog.size() == 26);
  CHECK(data.max_arity() == 8);
  CHECK_FALSE(data.experts.empty());
  CHECK(validate_study(data).empty());

  // the first expert carries the worked-example ratings for attack 1
  const auto& expert = data.experts.front();
  CHECK(expert.overall_ratings.at(1) == 25.00);
  CHECK(expert.overall_ratings.at(2) == 40.00);
  CHECK(expert.overall_ratings.at(3) == 20.50);
  CHECK(expert.overall_ratings.at(4) == 40.00);
  CHECK(expert.overall_ratings.at(5) == 70.00);
}

TEST_CASE("missing rankings fail validation naming expert and attack") {
  SynthParams params = noiseless_params();
  params.n_experts = 3;
  params.seed = 32;
  const auto dir = scratch_dir("missing_rank");
  emit_study(dir, generate_standard_study(params));
  patch_line(dir / "rankings.csv", "\n2,7,", "\n2,77,");  // re-key attack 7
  CHECK_THROWS_WITH(load_study(dir),
                    Catch::Matchers::ContainsSubstring("expert 2") &&
                        Catch::Matchers::ContainsSubstring("attack 7"));
}

TEST_CASE("out-of-range ratings fail validation") {
  SynthParams params = noiseless_params();
  params.n_experts = 2;
  params.seed = 33;
  const auto dir = scratch_dir("range");
  emit_study(dir, generate_standard_study(params));
  {
    // replace expert 2's rating for component 26 with 101
    std::string text = slurp(dir / "overall_ratings.csv");
    const auto at = text.find("\n2,26,");
    REQUIRE(at != std::string::npos);
    const auto eol = text.find('\n', at + 1);
    text.replace(at, eol - at, "\n2,26,101");
    std::ofstream out(dir / "overall_ratings.csv", std::ios::binary);
    out << text;
  }
  CHECK_THROWS_WITH(load_study(dir),
                    Catch::Matchers::ContainsSubstring("outside [0,100]"));
}

TEST_CASE("parse errors carry file and line") {
  SynthParams params = noiseless_params();
  params.n_experts = 2;
  params.seed = 34;
  const auto dir = scratch_dir("parse");
  emit_study(dir, generate_standard_study(params));
  patch_line(dir / "overall_ratings.csv", "\n1,3,", "\n1,x,");
  try {
    load_study(dir);
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("overall_ratings.csv") != std::string::npos);
    CHECK(what.find(":") != std::string::npos);
    CHECK(what.find("not a") != std::string::npos);
  }

  CHECK_THROWS_AS(load_study(dir / "does_not_exist"), DataError);
}

TEST_CASE("unknown question ids are rejected with their location") {
  SynthParams params = noiseless_params();
  params.n_experts = 2;
  params.seed = 35;
  const auto dir = scratch_dir("badq");
  emit_study(dir, generate_standard_study(params));
  // component 1 is attack-category; E1 does not belong to its question set
  patch_line(dir / "factor_ratings.csv", "\n1,1,A1,", "\n1,1,E1,");
  CHECK_THROWS_WITH(load_study(dir),
                    Catch::Matchers::ContainsSubstring("E1"));
}

TEST_CASE("cli: synth then validate then eval the worked example") {
  const auto dir = scratch_dir("cli_synth");
  const std::string out = (dir / "study").string();
  CHECK(cli_dispatch({"synth", "--out", out, "--experts", "4", "--seed",
                      "9"}) == 0);
  CHECK(cli_dispatch({"validate", "--data", out}) == 0);

  const auto [code, text] = capture_stdout([&] {
    return cli_dispatch({"eval", "--data", fixture_dir().string(), "--owa",
                         "0.33,0.27,0.20,0.13,0.07,0,0,0", "--expert", "1",
                         "--attack", "1"});
  });
  CHECK(code == 0);
  CHECK(text == "46.59\n");

  // uniform weights over the attack's true length give the plain mean
  const auto [mean_code, mean_text] = capture_stdout([&] {
    return cli_dispatch({"eval", "--data", fixture_dir().string(), "--owa",
                         "0.2,0.2,0.2,0.2,0.2", "--expert", "1", "--attack",
                         "1"});
  });
  CHECK(mean_code == 0);
  CHECK(mean_text == "39.10\n");
}

TEST_CASE("cli: train-owa writes a result report") {
  const auto dir = scratch_dir("cli_train");
  const std::string study = (dir / "study").string();
  REQUIRE(cli_dispatch({"synth", "--out", study, "--experts", "4", "--seed",
                        "10"}) == 0);
  const std::string out = (dir / "reports").string();
  CHECK(cli_dispatch({"train-owa", "--data", study, "--out", out, "--gens",
                      "10", "--pop", "20", "--copy", "0", "--cross", "0.20",
                      "--mut", "0.79", "--seed", "42"}) == 0);

  const auto report_path = std::filesystem::path(out) / "train_owa.json";
  REQUIRE(std::filesystem::exists(report_path));
  const json report = json::parse(slurp(report_path));
  CHECK(report.at("command") == "train-owa");
  CHECK(report.at("version") == std::string(kVersion));
  CHECK(report.at("result").at("config").at("seed") == 42);
  CHECK(report.at("result").at("best").at("values").size() == 8);
  CHECK(report.at("result").at("history").size() == 10);
  CHECK(report.at("reference_card").at("reproducible") == false);
}

TEST_CASE("cli: rerunning a command reproduces the report bytes") {
  const auto dir = scratch_dir("cli_determinism");
  const std::string study = (dir / "study").string();
  REQUIRE(cli_dispatch({"synth", "--out", study, "--experts", "4",
                        "--factor-noise", "3", "--seed", "11"}) == 0);

  const std::string out_a = (dir / "a").string();
  const std::string out_b = (dir / "b").string();
  for (const std::string& out : {out_a, out_b}) {
    REQUIRE(cli_dispatch({"train-wa", "--data", study, "--out", out,
                          "--category", "evade", "--gens", "12", "--pop",
                          "24", "--seed", "5"}) == 0);
  }
  CHECK(slurp(std::filesystem::path(out_a) / "train_wa_evade.json") ==
        slurp(std::filesystem::path(out_b) / "train_wa_evade.json"));
}

TEST_CASE("cli: robustness and extended write their reports") {
  const auto dir = scratch_dir("cli_rob_ext");
  const std::string study = (dir / "study").string();
  REQUIRE(cli_dispatch({"synth", "--out", study, "--experts", "6",
                        "--rank-noise", "4", "--seed", "13"}) == 0);

  CHECK(cli_dispatch({"robustness", "--data", study, "--out", dir.string(),
                      "--train-group", "even", "--gens", "12", "--pop", "24",
                      "--seed", "2"}) == 0);
  const json rob = json::parse(slurp(dir / "robustness_even.json"));
  CHECK(rob.at("result").at("train_group") == "even");
  // even-trained operator evaluated on the three odd experts
  CHECK(rob.at("result").at("transfer_fitness").at("per_expert").size() == 3);
  CHECK(rob.at("result").contains("correlation_degradation"));

  CHECK(cli_dispatch({"extended", "--data", study, "--out", dir.string(),
                      "--track", "wa-evade", "--seeds", "3", "--gens", "10",
                      "--pop", "20", "--seed", "6"}) == 0);
  const json ext = json::parse(slurp(dir / "extended_wa_evade.json"));
  CHECK(ext.at("result").at("per_seed_mse").size() == 3);
  CHECK(ext.at("result").at("all_histories_monotone") == true);

  const std::string csv = slurp(dir / "extended_wa_evade.csv");
  CHECK(csv.rfind("seed_index,mean_correlation,mse,w1,w2,w3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 seeds

  // a config file supplies defaults, explicit flags win
  {
    std::ofstream ini(dir / "run.ini");
    ini << "[extended]\nseeds=4\ngens=9\n";
  }
  CHECK(cli_dispatch({"--config", (dir / "run.ini").string(), "extended",
                      "--data", study, "--out", dir.string(), "--track",
                      "wa-evade", "--pop", "20", "--seed", "6", "--seeds",
                      "2"}) == 0);
  const json again = json::parse(slurp(dir / "extended_wa_evade.json"));
  CHECK(again.at("result").at("per_seed_mse").size() == 2);  // flag wins
  CHECK(again.at("result").at("config").at("generations") == 9);  // file used
}

TEST_CASE("cli: sweep with a missing data directory exits 2") {
  CHECK(cli_dispatch({"sweep", "--plan", "proportions", "--track", "owa",
                      "--group", "odd", "--data", "/nonexistent/dir"}) == 2);
}

TEST_CASE("cli: usage errors exit 1") {
  CHECK(cli_dispatch({"frobnicate"}) == 1);
  CHECK(cli_dispatch({"train-owa"}) == 1);  // --data is required
  CHECK(cli_dispatch({"sweep", "--plan", "bogus", "--track", "owa", "--data",
                      fixture_dir().string()}) == 1);
  CHECK(cli_dispatch({"eval", "--data", fixture_dir().string(), "--owa",
                      "0.9,0.5"}) == 1);  // not a simplex point
}

TEST_CASE("cli: chain runs with reference defaults on the fixture") {
  const auto dir = scratch_dir("cli_chain");
  CHECK(cli_dispatch({"chain", "--data", fixture_dir().string(), "--out",
                      dir.string()}) == 0);
  const json report = json::parse(slurp(dir / "chain.json"));
  CHECK(report.at("result").at("fitness").at("per_expert").size() ==
        load_study(fixture_dir()).experts.size());
}

TEST_CASE("weight vectors serialize with display forms") {
  const json j = to_json(WeightVector{{0.9484, 0.0516}});
  CHECK(j.at("values").size() == 2);
  CHECK(j.at("display").at(0) == "0.9484");
  CHECK(j.at("display").at(1) == "0.0516");
}

TEST_CASE("format_double round-trips through parsing") {
  Rng rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    const double v = rng.uniform(-1000.0, 1000.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.2) == "0.2");
}
