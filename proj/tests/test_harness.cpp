#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "isac/harness.hpp"

using namespace isac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "isac_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("unknown preset names the valid ones") {
  try {
    make_preset("fig9", default_scenario());
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fig9") != std::string::npos);
    for (const auto& name : preset_names()) {
      CHECK(msg.find(name) != std::string::npos);
    }
  }
}

TEST_CASE("presets encode their sweeps") {
  const ScenarioConfig base = default_scenario();
  CHECK(make_preset("roc_sweep", base).sweep_name == "secrecy_floor");
  CHECK(make_preset("accuracy_vs_caprx", base).sweep_values.size() == 5);
  CHECK(make_preset("sinr_vs_user_angle", base).base.n_rx == 1);
  CHECK(make_preset("custom", base).sweep_values.size() == 1);
}

TEST_CASE("scenario JSON parsing") {
  const ScenarioConfig base = default_scenario();
  SUBCASE("overrides apply") {
    const ScenarioConfig c = scenario_from_json(
        R"({"n_users": 3, "power_budget": 7.5,
            "user_regions": [{"center": [1, 2], "side": 10},
                             {"center": [3, 4], "side": 10},
                             {"center": [5, 6], "side": 10}]})",
        base);
    CHECK(c.n_users == 3);
    CHECK(c.power_budget == 7.5);
    CHECK(c.user_regions[2].center.x == 5.0);
    CHECK(c.cap_rx == base.cap_rx);  // untouched fields inherited
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(scenario_from_json(R"({"n_userz": 3})", base),
                    std::invalid_argument);
  }
  SUBCASE("malformed JSON is rejected") {
    CHECK_THROWS_AS(scenario_from_json("{oops", base), std::invalid_argument);
  }
  SUBCASE("violating invariants is rejected") {
    CHECK_THROWS_AS(scenario_from_json(R"({"var_noise_rx": -1.0})", base),
                    std::invalid_argument);
  }
}

TEST_CASE("experiment run writes the exact schema and is deterministic") {
  ExperimentSpec spec = make_preset("custom", default_scenario());
  spec.base.seed = 99;
  spec.n_channel_draws = 1;
  spec.n_detection_trials = 50;
  spec.out_dir = fresh_dir("run_a").string();
  const ExperimentSummary s1 = run_experiment(spec);

  const std::string csv = slurp(s1.csv_path);
  CHECK(csv.rfind(
            "preset,sweep_name,sweep_value,draw,seed,status,metric_name,"
            "metric_x,metric_y\n",
            0) == 0);
  // 49 ROC grid rows for the single draw and sweep value
  CHECK(s1.n_rows == 49);

  spec.out_dir = fresh_dir("run_b").string();
  const ExperimentSummary s2 = run_experiment(spec);
  CHECK(slurp(s2.csv_path) == csv);
  CHECK(slurp(s2.summary_path) == slurp(s1.summary_path));
}

TEST_CASE("plots are deterministic and validated") {
  ExperimentSpec spec = make_preset("custom", default_scenario());
  spec.base.seed = 5;
  spec.n_channel_draws = 1;
  spec.n_detection_trials = 50;
  spec.out_dir = fresh_dir("plot").string();
  const ExperimentSummary s = run_experiment(spec);

  const std::string svg1 = (fs::path(spec.out_dir) / "roc1.svg").string();
  const std::string svg2 = (fs::path(spec.out_dir) / "roc2.svg").string();
  emit_plot(s.csv_path, "roc", svg1);
  emit_plot(s.csv_path, "roc", svg2);
  const std::string body = slurp(svg1);
  CHECK(body == slurp(svg2));
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("false-alarm") != std::string::npos);

  SUBCASE("unknown kind") {
    CHECK_THROWS_AS(emit_plot(s.csv_path, "pie", svg1), std::invalid_argument);
  }
  SUBCASE("malformed CSV") {
    const std::string bad = (fs::path(spec.out_dir) / "bad.csv").string();
    std::ofstream(bad) << "not,a,results,file\n1,2\n";
    CHECK_THROWS_AS(emit_plot(bad, "roc", svg1), std::runtime_error);
  }
  SUBCASE("empty data is an error, not an empty plot") {
    const std::string empty = (fs::path(spec.out_dir) / "empty.csv").string();
    std::ofstream(empty) << "preset,sweep_name,sweep_value,draw,seed,status,"
                            "metric_name,metric_x,metric_y\n";
    CHECK_THROWS_AS(emit_plot(empty, "roc", svg1), std::runtime_error);
  }
}

TEST_CASE("spec validation") {
  ExperimentSpec spec = make_preset("custom", default_scenario());
  spec.sweep_values.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
