#include <doctest.h>

#include "isac/mm.hpp"

using namespace isac;

namespace {

struct Fixture {
  ScenarioConfig cfg;
  ChannelSet ch;
  Budgets budgets;
  NoiseLevels noise;
  MMSettings settings;

  explicit Fixture(std::uint64_t seed = 1) {
    cfg = ScenarioConfig{};
    cfg.tx_positions = {{0, 500}, {500, 500}};
    cfg.rx_positions = {{0, 250}, {500, 250}};
    cfg.user_regions = {{{200, 200}, 30}, {{300, 300}, 30}};
    cfg.eve_region = {{250, 250}, 30};
    Rng rng(seed);
    ch = draw_channels(cfg, rng);
    budgets = Budgets::from(cfg);
    noise = NoiseLevels::from(cfg);
  }
};

}  // namespace

TEST_CASE("settings validation") {
  MMSettings s;
  CHECK_NOTHROW(s.validate());
  s.epsilon = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("subproblem improves on the anchor and stays normalized") {
  Fixture f;
  Rng rng(2);
  const TransformedPoint anchor = initialize_feasible(f.ch, f.budgets, f.noise, rng);
  const TransformedPoint sol =
      solve_subproblem(anchor, f.ch, f.budgets, f.noise, f.settings);
  CHECK(transformed_objective(sol, f.ch) >=
        transformed_objective(anchor, f.ch) - f.settings.solver_tol);
  CHECK(std::abs(normalization_residual(sol, f.ch, f.noise.rx)) <= 1e-6);
  // solution stays feasible for the exact (not just surrogate) constraints
  for (int k = 0; k < f.cfg.n_users; ++k) {
    CHECK(transformed_secrecy_rate(sol, f.ch, f.noise, k) >=
          f.budgets.secrecy_floor - 1e-6);
  }
  for (int i = 0; i < f.cfg.n_tx; ++i) {
    CHECK(transformed_fronthaul_tx(sol, f.ch, i) <= f.budgets.cap_tx + 1e-6);
  }
  for (int j = 0; j < f.cfg.n_rx; ++j) {
    CHECK(transformed_fronthaul_rx(sol, f.ch, f.noise.rx, j) <=
          f.budgets.cap_rx + 1e-6);
  }
}

TEST_CASE("re-solving from a solved point is a fixed point") {
  Fixture f(7);
  Rng rng(3);
  const TransformedPoint anchor = initialize_feasible(f.ch, f.budgets, f.noise, rng);
  const TransformedPoint s1 =
      solve_subproblem(anchor, f.ch, f.budgets, f.noise, f.settings);
  const TransformedPoint s2 =
      solve_subproblem(s1, f.ch, f.budgets, f.noise, f.settings);
  const double o1 = transformed_objective(s1, f.ch);
  const double o2 = transformed_objective(s2, f.ch);
  CHECK(o2 >= o1 - f.settings.solver_tol);
}

TEST_CASE("an infeasible anchor is rejected") {
  Fixture f;
  Rng rng(4);
  TransformedPoint anchor = initialize_feasible(f.ch, f.budgets, f.noise, rng);
  anchor.omega_rx.setConstant(-1.0);
  CHECK_THROWS_AS(solve_subproblem(anchor, f.ch, f.budgets, f.noise, f.settings),
                  SolverError);
}
