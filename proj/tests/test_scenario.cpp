#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cbx/scenario.hpp"

using namespace cbx;

namespace {

json shrink_levels(json config, std::vector<int> levels) {
  config["levels"] = levels;
  return config;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST_CASE("scenario schema validation") {
  SUBCASE("seed is mandatory") {
    CHECK_THROWS_AS(scenario_from_json(json{{"name", "x"}}), std::invalid_argument);
  }
  SUBCASE("unknown functional kind is a schema error") {
    json cfg{{"name", "x"},
             {"seed", 1},
             {"functionals", {{{"name", "f"}, {"kind", "mystery"}}}}};
    CHECK_THROWS_AS(scenario_from_json(cfg), std::invalid_argument);
  }
  SUBCASE("probe referencing an unknown functional is a schema error") {
    json cfg{{"name", "x"},
             {"seed", 1},
             {"functionals", json::array()},
             {"probes", {{{"kind", "downward"}, {"functional", "nope"}}}}};
    CHECK_THROWS_AS(scenario_from_json(cfg), std::invalid_argument);
  }
  SUBCASE("unknown probe kind is a schema error") {
    json cfg{{"name", "x"},
             {"seed", 1},
             {"functionals", {{{"name", "sup"}, {"kind", "sup"}}}},
             {"probes", {{{"kind", "telepathy"}, {"functional", "sup"}}}}};
    CHECK_THROWS_AS(scenario_from_json(cfg), std::invalid_argument);
  }
  SUBCASE("every canned scenario parses") {
    for (const std::string& name : canned_scenario_names()) {
      CHECK_NOTHROW(scenario_from_json(canned_scenario(name)));
    }
  }
}

TEST_CASE("empty probe list runs clean") {
  const ScenarioConfig cfg = scenario_from_json(json{{"name", "empty"}, {"seed", 4}});
  const ScenarioOutcome out = run_scenario(cfg);
  CHECK(out.exit_code == 0);
  CHECK(out.all_match);
  CHECK(out.verdicts.at("results").empty());
}

TEST_CASE("canned lebesgue scenario matches its expectations at small levels") {
  const ScenarioConfig cfg =
      scenario_from_json(shrink_levels(canned_scenario("lebesgue"), {4, 8, 16}));
  const ScenarioOutcome out = run_scenario(cfg);
  if (!out.all_match) {
    for (const auto& m : out.mismatches) MESSAGE(m);
  }
  CHECK(out.exit_code == 0);
}

TEST_CASE("canned factorization scenario matches at small levels") {
  const ScenarioConfig cfg =
      scenario_from_json(shrink_levels(canned_scenario("factorization"), {4, 8}));
  const ScenarioOutcome out = run_scenario(cfg);
  CHECK(out.exit_code == 0);
}

TEST_CASE("expectation mismatch yields nonzero exit with a listing") {
  json cfg = shrink_levels(canned_scenario("lebesgue"), {4, 8, 16});
  cfg["probes"][0]["expect"] = "has-lebesgue";  // sup actually fails Lebesgue
  const ScenarioOutcome out = run_scenario(scenario_from_json(cfg));
  CHECK(out.exit_code == 2);
  CHECK_FALSE(out.all_match);
  REQUIRE(!out.mismatches.empty());
  CHECK(out.mismatches.front().find("fails-lebesgue") != std::string::npos);
}

TEST_CASE("reruns with the same seed are byte-identical; outputs land on disk") {
  const json base = shrink_levels(canned_scenario("lebesgue"), {4, 8, 16});
  const ScenarioOutcome a = run_scenario(scenario_from_json(base));
  const ScenarioOutcome b = run_scenario(scenario_from_json(base));
  CHECK(a.verdicts.dump(2) == b.verdicts.dump(2));
  REQUIRE(a.csv_files.size() == b.csv_files.size());
  for (std::size_t i = 0; i < a.csv_files.size(); ++i) {
    CHECK(a.csv_files[i].second == b.csv_files[i].second);
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cbx_scenario_test";
  fs::remove_all(dir);
  write_scenario_outputs(a, dir.string());
  CHECK(fs::exists(dir / "verdicts.json"));
  CHECK(fs::exists(dir / "metadata.json"));
  const std::string verdicts = slurp(dir / "verdicts.json");
  CHECK(verdicts.find("\"all_match\": true") != std::string::npos);
  // CSV trajectory files carry the normative header.
  bool saw_csv = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") {
      saw_csv = true;
      CHECK(slurp(entry.path()).rfind("level,n,value\n", 0) == 0);
    }
  }
  CHECK(saw_csv);
  fs::remove_all(dir);
}

TEST_CASE("functional configs parse the normative forms") {
  const FamilyInstance inst = make_instance({}, 4);
  CHECK(functional_from_json(json{{"kind", "sup"}}, inst)->dim() == 4);
  CHECK(functional_from_json(json{{"kind", "max-over-compactification"}}, inst)->dim() ==
        5);
  const json entropic = {{"kind", "entropic"}, {"p", {0.25, 0.25, 0.25, 0.25}}};
  CHECK(functional_from_json(entropic, inst)->kind() == "entropic");
  const json table = {
      {"kind", "penalty-table"},
      {"entries", {{{"mu", {0.5, 0.5, 0.0, 0.0}}, {"alpha", 0.0}}}}};
  CHECK(functional_from_json(table, inst)->kind() == "penalty-table");
  const json lin = {{"kind", "linear-expectation"}, {"mu", {0.1, 0.2, 0.3, 0.4}}};
  CHECK(functional_from_json(lin, inst)->kind() == "linear-expectation");
  CHECK_THROWS_AS(functional_from_json(json{{"kind", "mystery"}}, inst),
                  std::invalid_argument);
}

TEST_CASE("space configs parse both normative forms") {
  const json family = {{"family", "harmonic-points"}, {"level", 3}};
  const Compactification a = compactification_from_json(family);
  CHECK(a.interior_size() == 3);

  json explicit_cfg;
  explicit_cfg["points"] = {"a", "b", "z"};
  explicit_cfg["dist"] = {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}};
  explicit_cfg["interior"] = {0, 1};
  explicit_cfg["boundary_sets"] = {{2}};
  const Compactification b = compactification_from_json(explicit_cfg);
  CHECK(b.interior_size() == 2);
  CHECK(b.boundary_sets.size() == 1);

  json bad = explicit_cfg;
  bad["dist"] = {{0.0, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(compactification_from_json(bad), std::invalid_argument);
  json violate = explicit_cfg;
  violate["dist"] = {{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}};
  CHECK_THROWS_AS(compactification_from_json(violate), std::invalid_argument);
  json unknown_family = {{"family", "hyperbolic-points"}, {"level", 3}};
  CHECK_THROWS_AS(compactification_from_json(unknown_family), std::invalid_argument);
}
