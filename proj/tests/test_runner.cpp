#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "lyapscope/runner.hpp"

using namespace lyap;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("lyapscope_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config: parse errors carry the offending field") {
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"seed", 3}}), ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json({{"seed", 3}}),
                       doctest::Contains("experiment"), ConfigError);
  const fs::path dir = fresh_dir("cfg");
  {
    std::ofstream f(dir / "broken.json");
    f << "{ not json";
  }
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "missing.json"), ConfigError);
}

TEST_CASE("config: rational forms and hash sensitivity") {
  CHECK(parse_rational(nlohmann::json("1/5"), "a") == Rational(1, 5));
  CHECK(parse_rational(nlohmann::json::array({1, 20}), "a") == Rational(1, 20));
  CHECK(parse_rational(nlohmann::json(3), "a") == Rational(3));
  CHECK_THROWS_AS(parse_rational(nlohmann::json("x/y"), "a"), ConfigError);

  ExperimentConfig a = ExperimentConfig::from_json({{"experiment", "exponents"}});
  ExperimentConfig b = a;
  b.seed = 99;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("run: identity-map exponents produce an all-zero table") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      {{"experiment", "exponents"}, {"map", {{"kind", "identity"}}}, {"n", 150}, {"points", 3}});
  cfg.out_dir = fresh_dir("idexp");
  const auto manifest = run(cfg);
  CHECK(manifest.row_counts.at("exponents.csv") == 3);
  const std::string csv = slurp(cfg.out_dir / "exponents.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line) && !line.empty()) {
    // lambda columns are 6 and 7 (0-based 5, 6)
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    CHECK(std::fabs(std::stod(cells[5])) < 1e-12);
    CHECK(std::fabs(std::stod(cells[6])) < 1e-12);
  }
}

TEST_CASE("run: unknown experiment is a config error") {
  ExperimentConfig cfg = ExperimentConfig::from_json({{"experiment", "frobnicate"}});
  cfg.out_dir = fresh_dir("unknown");
  CHECK_THROWS_AS(run(cfg), ConfigError);
}

TEST_CASE("run: required convergence turns a flagged estimate into a numeric failure") {
  // seed next to the stable direction with no settle-in: the early cocycle
  // values drag the proxy over the threshold
  const double theta_s = oseledets_directions(SurfaceMap::cat(), {0.3, 0.61}, 60).theta_s;
  ExperimentConfig cfg = ExperimentConfig::from_json(
      {{"experiment", "exponents"},
       {"map", {{"kind", "torus-linear"}, {"params", {2, 1, 1, 1}}}},
       {"n", 100},
       {"points", 2},
       {"theta0", theta_s + 1e-7},
       {"burn_fraction", 0.0},
       {"require_convergence", true}});
  cfg.out_dir = fresh_dir("noconv");
  CHECK_THROWS_AS(run(cfg), NumericError);
}

TEST_CASE("run: orbit escape surfaces as a numeric failure") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      {{"experiment", "exponents"},
       {"map", {{"kind", "henon-like"}, {"params", {1.4, 0.3}}}},
       {"n", 200},
       {"points", 2}});
  cfg.out_dir = fresh_dir("escape");
  // random torus seeds are far from the attractor basin inside the rectangle
  CHECK_THROWS_AS(run(cfg), NumericError);
}

TEST_CASE("run: fixed seed reproduces byte-identical artifacts") {
  auto make = [&](const std::string& tag) {
    ExperimentConfig cfg = ExperimentConfig::from_json(
        {{"experiment", "neutral"},
         {"map", {{"kind", "perturbed-torus"}, {"params", {2, 1, 1, 1, 0.2, 0.1}}}},
         {"n", 800},
         {"alpha", {0.3, 0.9}},
         {"L", {2, 5}},
         {"seed", 42}});
    cfg.out_dir = fresh_dir(tag);
    run(cfg);
    return cfg.out_dir;
  };
  const fs::path a = make("det_a"), b = make("det_b");
  for (const char* name : {"neutral.csv", "neutral.json", "config.json"})
    CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("run + report round trip") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      {{"experiment", "shift-example1"}, {"k", {10, 20}}, {"alpha", {"1/5"}}, {"L", 5}});
  cfg.out_dir = fresh_dir("report");
  run(cfg);
  const auto rep = report(cfg.out_dir);
  CHECK(rep.text.find("example1.csv") != std::string::npos);
  CHECK(fs::exists(cfg.out_dir / "report.svg"));
  CHECK(rep.svg.find("<svg") == 0);

  CHECK_THROWS_AS(report(fresh_dir("empty")), ConfigError);
}

TEST_CASE("run: neutral emits block and atom-level JSON") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      {{"experiment", "neutral"},
       {"map", {{"kind", "identity"}}},
       {"n", 64},
       {"alpha", {0.2}},
       {"L", {3}}});
  cfg.out_dir = fresh_dir("neutatoms");
  run(cfg);
  const auto cells = nlohmann::json::parse(slurp(cfg.out_dir / "neutral.json"));
  REQUIRE(cells.size() == 1);
  CHECK(cells[0]["beta"] == 0.0);
  CHECK(cells[0]["blocks"] == nlohmann::json::array({{0, 64}}));
  const auto d = nlohmann::json::parse(slurp(cfg.out_dir / "decomposition.json"));
  CHECK(d["m0"]["total_mass"] == 1.0);
  CHECK(d["m0"]["atoms"].size() == 64);
  CHECK(d["m0"]["atoms"][0]["site"].size() == 3);  // (u, v, theta)
  CHECK(d["m0"]["atoms"][0]["w"].get<double>() == doctest::Approx(1.0 / 64).epsilon(1e-15));
}

TEST_CASE("run: family sweep verdict reports the identity flags and the Ruelle gate") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      {{"experiment", "sweep-identity-check"},
       {"mode", "family"},
       {"family", {{"kind", "perturbed-torus"}, {"params", {2, 1, 1, 1, 0.3, 0.2}}}},
       {"k", {1, 2, 4, 8}},
       {"n_exponent", 300},
       {"points", 1500},
       {"n_cover", 8},
       {"seed", 6}});
  cfg.out_dir = fresh_dir("famsweep");
  run(cfg);
  const auto v = nlohmann::json::parse(slurp(cfg.out_dir / "verdict.json"));
  CHECK(v["exponent_identity"] == true);
  CHECK(v["entropy_inequality"] == true);
  CHECK(v["variant_bound"] == true);
  CHECK(v["ruelle_gate"] == true);

  // the report echoes the verdict flags
  const auto rep = report(cfg.out_dir);
  CHECK(rep.text.find("exponent_identity: true") != std::string::npos);
}

TEST_CASE("run: shift-example1 rows all match the closed form") {
  ExperimentConfig cfg = ExperimentConfig::from_json({{"experiment", "shift-example1"},
                                                      {"variants", {"p", "q"}},
                                                      {"k", {10, 50}},
                                                      {"alpha", {"1/5", "1/20"}},
                                                      {"L", 5}});
  cfg.out_dir = fresh_dir("ex1rows");
  run(cfg);
  const std::string csv = slurp(cfg.out_dir / "example1.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line) && !line.empty()) {
    ++rows;
    // "match" is the 9th column (0-based 8)
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    CHECK(cells[8] == "1");
  }
  CHECK(rows == 8);
}
