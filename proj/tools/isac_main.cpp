#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "isac/harness.hpp"

namespace {

int cmd_run(const std::string& preset, const std::string& config_path,
            std::uint64_t seed, const std::string& out_dir, int draws, int trials) {
  isac::ScenarioConfig base = isac::default_scenario();
  isac::ExperimentSpec spec = isac::make_preset(preset, base);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file '" << config_path << "'\n";
      return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    spec.base = isac::scenario_from_json(ss.str(), spec.base);
    // preset-specific overrides (antenna counts etc.) must survive a config
    // that did not mention them, so rebuild the sweep on the merged scenario
    const std::string sweep_name = spec.sweep_name;
    const auto sweep_values = spec.sweep_values;
    isac::ExperimentSpec merged = isac::make_preset(preset, spec.base);
    merged.base = spec.base;
    merged.sweep_name = sweep_name;
    merged.sweep_values = sweep_values;
    spec = merged;
  }
  spec.base.seed = seed;
  spec.out_dir = out_dir;
  if (draws > 0) spec.n_channel_draws = draws;
  if (trials > 0) spec.n_detection_trials = trials;

  const isac::ExperimentSummary summary = isac::run_experiment(spec);
  std::cout << "wrote " << summary.csv_path << " (" << summary.n_rows << " rows, "
            << summary.n_failed_draws << "/" << summary.n_total_draws
            << " draws failed)\n";
  std::cout << "wrote " << summary.summary_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure cell-free ISAC simulation toolkit"};
  app.require_subcommand(1);

  std::string preset, config_path, out_dir, csv_path, kind, out_file;
  std::uint64_t seed = 0;
  int draws = 0, trials = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment preset");
  run->add_option("--preset", preset, "preset name")
      ->required()
      ->check(CLI::IsMember(isac::preset_names()));
  run->add_option("--config", config_path, "JSON scenario overrides");
  run->add_option("--seed", seed, "base RNG seed")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--draws", draws, "channel draws per sweep value");
  run->add_option("--trials", trials, "detection trials per hypothesis");

  CLI::App* plot = app.add_subcommand("plot", "render an SVG from results.csv");
  plot->add_option("--csv", csv_path, "results.csv path")->required();
  plot->add_option("--kind", kind, "plot kind")
      ->required()
      ->check(CLI::IsMember({"roc", "accuracy", "sinr"}));
  plot->add_option("--out", out_file, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) {
      return cmd_run(preset, config_path, seed, out_dir, draws, trials);
    }
    isac::emit_plot(csv_path, kind, out_file);
    std::cout << "wrote " << out_file << "\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
