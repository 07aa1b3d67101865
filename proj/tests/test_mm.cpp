#include <doctest.h>

#include <cmath>

#include "isac/mm.hpp"

using namespace isac;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.tx_positions = {{0, 500}, {500, 500}};
  cfg.rx_positions = {{0, 250}, {500, 250}};
  cfg.user_regions = {{{200, 200}, 30}, {{300, 300}, 30}};
  cfg.eve_region = {{250, 250}, 30};
  return cfg;
}

}  // namespace

TEST_CASE("rank-one extraction") {
  SUBCASE("exact rank-1 input recovers the vector up to phase") {
    Rng rng(1);
    Eigen::VectorXcd w(3);
    for (int r = 0; r < 3; ++r) w(r) = complex_gaussian(rng, 1.0);
    double ratio = -1.0;
    const Eigen::VectorXcd u = extract_rank_one(w * w.adjoint(), &ratio);
    CHECK(ratio <= 1e-12);
    // align phases before comparing
    const std::complex<double> phase = w.dot(u) / std::abs(w.dot(u));
    CHECK((u - phase * w).norm() <= 1e-9 * w.norm());
  }
  SUBCASE("diagonal input picks the dominant axis") {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2, 2);
    v(0, 0) = 4.0;
    v(1, 1) = 1.0;
    double ratio = -1.0;
    const Eigen::VectorXcd u = extract_rank_one(v, &ratio);
    CHECK(std::abs(u(0)) == doctest::Approx(2.0));
    CHECK(std::abs(u(1)) <= 1e-12);
    CHECK(ratio == doctest::Approx(0.25));
  }
  SUBCASE("zero matrix gives the zero vector") {
    double ratio = -1.0;
    const Eigen::VectorXcd u =
        extract_rank_one(Eigen::MatrixXcd::Zero(2, 2), &ratio);
    CHECK(u.norm() == 0.0);
  }
}

TEST_CASE("feasible initialization has positive slack everywhere") {
  const ScenarioConfig cfg = small_config();
  Rng rng(2);
  const ChannelSet ch = draw_channels(cfg, rng);
  const Budgets budgets = Budgets::from(cfg);
  const NoiseLevels noise = NoiseLevels::from(cfg);
  const TransformedPoint theta = initialize_feasible(ch, budgets, noise, rng);

  CHECK(std::abs(normalization_residual(theta, ch, noise.rx)) <= 1e-8);
  CHECK(theta.z > 0.0);
  for (int k = 0; k < cfg.n_users; ++k) {
    CHECK(transformed_secrecy_rate(theta, ch, noise, k) > budgets.secrecy_floor);
  }
  for (int i = 0; i < cfg.n_tx; ++i) {
    CHECK(transformed_fronthaul_tx(theta, ch, i) < budgets.cap_tx);
  }
  for (int j = 0; j < cfg.n_rx; ++j) {
    CHECK(transformed_fronthaul_rx(theta, ch, noise.rx, j) < budgets.cap_rx);
  }
}

TEST_CASE("absurd secrecy floor is reported infeasible") {
  const ScenarioConfig cfg = small_config();
  Rng rng(3);
  const ChannelSet ch = draw_channels(cfg, rng);
  Budgets budgets = Budgets::from(cfg);
  budgets.secrecy_floor = 1e3;
  const NoiseLevels noise = NoiseLevels::from(cfg);
  CHECK_THROWS_AS(initialize_feasible(ch, budgets, noise, rng), InfeasibleError);
}

TEST_CASE("null Eve channel initializes whenever the floor is reachable") {
  const ScenarioConfig cfg = small_config();
  Rng rng(4);
  ChannelSet ch = draw_channels(cfg, rng);
  ch.h_eve.setZero();
  Budgets budgets = Budgets::from(cfg);
  budgets.secrecy_floor = 0.1;
  const NoiseLevels noise = NoiseLevels::from(cfg);
  const TransformedPoint theta = initialize_feasible(ch, budgets, noise, rng);
  for (int k = 0; k < cfg.n_users; ++k) {
    CHECK(transformed_secrecy_rate(theta, ch, noise, k) > budgets.secrecy_floor);
  }
}

TEST_CASE("zero sensing channel terminates immediately") {
  ScenarioConfig cfg = small_config();
  cfg.var_scatter = 0.0;
  Rng rng(5);
  const ChannelSet ch = draw_channels(cfg, rng);
  const auto [design, trace] =
      mm_optimize(ch, Budgets::from(cfg), NoiseLevels::from(cfg), MMSettings{}, rng);
  CHECK(trace.iterations.size() == 1);
  CHECK(trace.converged);
  CHECK(sensing_sinr(design, ch, NoiseLevels::from(cfg).rx) == 0.0);
}

TEST_CASE("full optimization is monotone and ends feasible") {
  const ScenarioConfig cfg = small_config();
  Rng rng(6);
  const ChannelSet ch = draw_channels(cfg, rng);
  const Budgets budgets = Budgets::from(cfg);
  const NoiseLevels noise = NoiseLevels::from(cfg);
  const MMSettings settings;
  const auto [design, trace] = mm_optimize(ch, budgets, noise, settings, rng);

  REQUIRE(!trace.iterations.empty());
  for (std::size_t n = 1; n < trace.iterations.size(); ++n) {
    CHECK(trace.iterations[n].objective >=
          trace.iterations[n - 1].objective -
              settings.solver_tol * (1.0 + std::abs(trace.iterations[n].objective)));
  }
  CHECK(trace.converged);
  const FeasibilityReport rep = check_feasibility(design, ch, budgets, noise, 1e-4);
  INFO(rep.summary());
  CHECK(rep.all_pass);
  CHECK(trace.rank_reports.size() == static_cast<std::size_t>(cfg.n_users));
}
