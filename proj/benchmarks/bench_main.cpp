#include <benchmark/benchmark.h>

#include "isac/harness.hpp"

namespace {

isac::ScenarioConfig small_config() {
  isac::ScenarioConfig c = isac::default_scenario();
  c.n_antennas = 2;
  return c;
}

void BM_DrawChannels(benchmark::State& state) {
  const auto cfg = small_config();
  isac::Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(isac::draw_channels(cfg, rng));
  }
}
BENCHMARK(BM_DrawChannels);

void BM_SubproblemSolve(benchmark::State& state) {
  const auto cfg = small_config();
  isac::Rng rng(1);
  const auto ch = isac::draw_channels(cfg, rng);
  const auto budgets = isac::Budgets::from(cfg);
  const auto noise = isac::NoiseLevels::from(cfg);
  const auto anchor = isac::initialize_feasible(ch, budgets, noise, rng);
  isac::MMSettings settings;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        isac::solve_subproblem(anchor, ch, budgets, noise, settings));
  }
}
BENCHMARK(BM_SubproblemSolve);

void BM_MMOptimize(benchmark::State& state) {
  const auto cfg = small_config();
  const auto budgets = isac::Budgets::from(cfg);
  const auto noise = isac::NoiseLevels::from(cfg);
  isac::MMSettings settings;
  for (auto _ : state) {
    isac::Rng rng(1);
    const auto ch = isac::draw_channels(cfg, rng);
    benchmark::DoNotOptimize(isac::mm_optimize(ch, budgets, noise, settings, rng));
  }
}
BENCHMARK(BM_MMOptimize);

void BM_SimulateRoc(benchmark::State& state) {
  const auto cfg = small_config();
  isac::Rng rng(2);
  const auto ch = isac::draw_channels(cfg, rng);
  const auto budgets = isac::Budgets::from(cfg);
  const auto noise = isac::NoiseLevels::from(cfg);
  const auto design = isac::random_beamforming_design(ch, budgets, noise, rng);
  for (auto _ : state) {
    isac::Rng det_rng(3);
    benchmark::DoNotOptimize(
        isac::simulate_roc(design, ch, noise.rx, isac::DetectionMode::Centralized,
                           cfg.n_symbols, 200, det_rng));
  }
}
BENCHMARK(BM_SimulateRoc);

}  // namespace

BENCHMARK_MAIN();
