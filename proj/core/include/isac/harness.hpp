#pragma once

#include <string>
#include <vector>

#include "isac/baselines.hpp"
#include "isac/detection.hpp"

namespace isac {

/// One experiment: a preset, a base scenario, a sweep, and Monte Carlo sizes.
struct ExperimentSpec {
  std::string preset;  // roc_sweep | accuracy_vs_caprx | sinr_vs_user_angle | custom
  ScenarioConfig base;
  std::string sweep_name;
  std::vector<double> sweep_values;
  int n_channel_draws = 20;
  int n_detection_trials = 5000;
  std::string out_dir;
  MMSettings mm;

  void validate() const;
};

/// Names of the supported presets.
const std::vector<std::string>& preset_names();

/// Scenario defaults shared by the presets (geometry and statistics of the
/// reference two-TX / two-RX layout).
ScenarioConfig default_scenario();

/// Builds the named preset on top of a base scenario. Throws
/// std::invalid_argument for unknown names.
ExperimentSpec make_preset(const std::string& name, const ScenarioConfig& base);

/// Parses a strict JSON scenario: keys must mirror ScenarioConfig field names
/// exactly; unknown keys are errors. Present keys override `base`.
ScenarioConfig scenario_from_json(const std::string& json_text,
                                  const ScenarioConfig& base);

struct ExperimentSummary {
  std::string csv_path;
  std::string summary_path;
  int n_rows = 0;
  int n_failed_draws = 0;
  int n_total_draws = 0;
};

/// Runs the experiment: per sweep value and channel draw, optimizes, detects,
/// and aggregates; writes results.csv and summary.json into spec.out_dir.
/// Infeasible draws are recorded with a status column. Throws only if every
/// draw fails or the output directory is unwritable.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// Renders a deterministic SVG line plot from a results.csv file.
/// kind: roc | accuracy | sinr.
void emit_plot(const std::string& csv_path, const std::string& kind,
               const std::string& out_svg);

}  // namespace isac
