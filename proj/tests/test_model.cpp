#include <doctest.h>

#include <cmath>

#include "isac/harness.hpp"

using namespace isac;

namespace {

struct Fixture {
  ScenarioConfig cfg;
  ChannelSet ch;
  NoiseLevels noise;

  explicit Fixture(std::uint64_t seed = 1) {
    cfg = default_scenario();
    Rng rng(seed);
    ch = draw_channels(cfg, rng);
    noise = NoiseLevels::from(cfg);
  }

  DesignPoint zero_design(double q = 0.1) const {
    DesignPoint d;
    d.beam = Eigen::MatrixXcd::Zero(cfg.tx_dim(), cfg.n_users);
    d.q_tx = Eigen::VectorXd::Constant(cfg.n_tx, q);
    d.q_rx = Eigen::VectorXd::Constant(cfg.n_rx, q);
    return d;
  }

  DesignPoint random_design(std::uint64_t seed, double q = 0.1) const {
    DesignPoint d = zero_design(q);
    Rng rng(seed);
    for (int k = 0; k < cfg.n_users; ++k) {
      for (int r = 0; r < cfg.tx_dim(); ++r) {
        d.beam(r, k) = complex_gaussian(rng, 1.0);
      }
    }
    return d;
  }
};

}  // namespace

TEST_CASE("transmit power of a zero beam is the quantization trace") {
  Fixture f;
  f.cfg.n_antennas = 3;
  Rng rng(2);
  f.ch = draw_channels(f.cfg, rng);
  const DesignPoint d = f.zero_design(0.1);
  CHECK(transmit_power(d, f.ch, 0) == doctest::Approx(0.3));
}

TEST_CASE("transmit power of a unit-norm column is one") {
  Fixture f;
  DesignPoint d = f.zero_design(1e-15);
  d.beam(0, 0) = 1.0;
  CHECK(transmit_power(d, f.ch, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(transmit_power(d, f.ch, 99), std::out_of_range);
}

TEST_CASE("user SINR with a zero beamformer is zero") {
  Fixture f;
  const DesignPoint d = f.zero_design();
  CHECK(user_sinr(d, f.ch, 0, f.noise.user) == 0.0);
}

TEST_CASE("single-user SINR reduces to received signal power") {
  ScenarioConfig cfg = default_scenario();
  cfg.n_users = 1;
  cfg.user_regions.resize(1);
  Rng rng(4);
  const ChannelSet ch = draw_channels(cfg, rng);
  DesignPoint d;
  d.beam = Eigen::MatrixXcd::Zero(cfg.tx_dim(), 1);
  for (int r = 0; r < cfg.tx_dim(); ++r) d.beam(r, 0) = complex_gaussian(rng, 1.0);
  d.q_tx = Eigen::VectorXd::Constant(cfg.n_tx, 1e-15);
  d.q_rx = Eigen::VectorXd::Constant(cfg.n_rx, 0.1);
  const double expect = std::norm(ch.h_users.col(0).dot(d.beam.col(0)));
  CHECK(user_sinr(d, ch, 0, 1.0) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("Eve SINR vanishes for a null Eve channel or orthogonal beam") {
  Fixture f;
  DesignPoint d = f.random_design(9);
  SUBCASE("h_E = 0") {
    f.ch.h_eve.setZero();
    CHECK(eve_sinr(d, f.ch, 0, f.noise.eve) == 0.0);
  }
  SUBCASE("beam projected out of the Eve direction") {
    const Eigen::VectorXcd he = f.ch.h_eve;
    d.beam.col(0) -= he * (he.dot(d.beam.col(0)) / he.squaredNorm());
    CHECK(eve_sinr(d, f.ch, 0, f.noise.eve) <= 1e-18);
  }
}

TEST_CASE("secrecy rate with no eavesdropper is the min user rate") {
  Fixture f;
  f.ch.h_eve.setZero();
  const DesignPoint d = f.random_design(10);
  double expect = 1e300;
  for (int k = 0; k < f.cfg.n_users; ++k) {
    expect = std::min(expect, std::log2(1.0 + user_sinr(d, f.ch, k, f.noise.user)));
  }
  CHECK(secrecy_rate(d, f.ch, f.noise) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("secrecy rate clamps at zero when Eve mirrors the user") {
  ScenarioConfig cfg = default_scenario();
  cfg.n_users = 1;
  cfg.user_regions.resize(1);
  cfg.var_noise_eve = cfg.var_noise_user;
  Rng rng(12);
  ChannelSet ch = draw_channels(cfg, rng);
  ch.h_eve = ch.h_users.col(0);
  DesignPoint d;
  d.beam = Eigen::MatrixXcd::Zero(cfg.tx_dim(), 1);
  for (int r = 0; r < cfg.tx_dim(); ++r) d.beam(r, 0) = complex_gaussian(rng, 1.0);
  d.q_tx = Eigen::VectorXd::Constant(cfg.n_tx, 0.05);
  d.q_rx = Eigen::VectorXd::Constant(cfg.n_rx, 0.05);
  CHECK(secrecy_rate(d, ch, NoiseLevels::from(cfg)) == 0.0);
}

TEST_CASE("secrecy rate matches a direct re-evaluation") {
  Fixture f(21);
  const DesignPoint d = f.random_design(22);
  double expect = 1e300;
  for (int k = 0; k < f.cfg.n_users; ++k) {
    // independent evaluation straight from the rate definitions
    double interference_u = 0.0, interference_e = 0.0;
    for (int kk = 0; kk < f.cfg.n_users; ++kk) {
      if (kk == k) continue;
      interference_u += std::norm(f.ch.h_users.col(k).dot(d.beam.col(kk)));
      interference_e += std::norm(f.ch.h_eve.dot(d.beam.col(kk)));
    }
    double quant_u = 0.0, quant_e = 0.0;
    for (int i = 0; i < f.cfg.n_tx; ++i) {
      const auto hu = f.ch.h_users.col(k).segment(i * f.cfg.n_antennas, f.cfg.n_antennas);
      const auto he = f.ch.h_eve.segment(i * f.cfg.n_antennas, f.cfg.n_antennas);
      quant_u += d.q_tx(i) * hu.squaredNorm();
      quant_e += d.q_tx(i) * he.squaredNorm();
    }
    const double gu = std::norm(f.ch.h_users.col(k).dot(d.beam.col(k))) /
                      (interference_u + quant_u + f.noise.user);
    const double ge = std::norm(f.ch.h_eve.dot(d.beam.col(k))) /
                      (interference_e + quant_e + f.noise.eve);
    expect = std::min(expect, std::log2(1.0 + gu) - std::log2(1.0 + ge));
  }
  expect = std::max(expect, 0.0);
  CHECK(secrecy_rate(d, f.ch, f.noise) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("sensing SINR corner cases") {
  Fixture f;
  SUBCASE("zero transmit covariance gives zero") {
    const DesignPoint d = f.zero_design(1e-15);
    CHECK(sensing_sinr(d, f.ch, f.noise.rx) <= 1e-9);
  }
  SUBCASE("G = C with no noise gives one") {
    f.ch.c_clutter = f.ch.g_sense;
    DesignPoint d = f.random_design(31);
    d.q_rx = Eigen::VectorXd::Constant(f.cfg.n_rx, 1e-15);
    const std::vector<double> zero_noise(f.cfg.n_rx, 0.0);
    CHECK(sensing_sinr(d, f.ch, zero_noise) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("sensing SINR decreases in the RX quantization level") {
  Fixture f;
  DesignPoint d = f.random_design(33);
  const double base = sensing_sinr(d, f.ch, f.noise.rx);
  d.q_rx(0) *= 4.0;
  CHECK(sensing_sinr(d, f.ch, f.noise.rx) < base);
}

TEST_CASE("TX fronthaul rate corner cases") {
  Fixture f;
  SUBCASE("zero beam cancels the logdet") {
    const DesignPoint d = f.zero_design(0.3);
    CHECK(fronthaul_rate_tx(d, f.ch, 0) == doctest::Approx(0.0));
  }
  SUBCASE("scalar instance") {
    ScenarioConfig cfg = default_scenario();
    cfg.n_tx = 1;
    cfg.n_rx = 1;
    cfg.n_users = 1;
    cfg.n_antennas = 1;
    cfg.tx_positions = {{0, 500}};
    cfg.rx_positions = {{0, 250}};
    cfg.user_regions = {{{200, 200}, 30}};
    Rng rng(1);
    const ChannelSet ch = draw_channels(cfg, rng);
    DesignPoint d;
    d.beam = Eigen::MatrixXcd::Constant(1, 1, 1.0);
    d.q_tx = Eigen::VectorXd::Constant(1, 1.0);
    d.q_rx = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(fronthaul_rate_tx(d, ch, 0) == doctest::Approx(1.0));
  }
  SUBCASE("joint scale invariance") {
    DesignPoint d = f.random_design(41, 0.2);
    const double base = fronthaul_rate_tx(d, f.ch, 0);
    const double c = 3.7;
    d.beam *= std::sqrt(c);
    d.q_tx *= c;
    CHECK(fronthaul_rate_tx(d, f.ch, 0) == doctest::Approx(base).epsilon(1e-10));
  }
  SUBCASE("nonpositive quantization level is rejected") {
    DesignPoint d = f.zero_design();
    d.q_tx(0) = 0.0;
    CHECK_THROWS_AS(fronthaul_rate_tx(d, f.ch, 0), std::invalid_argument);
  }
}

TEST_CASE("RX fronthaul rate corner cases") {
  Fixture f;
  SUBCASE("no sensing or clutter path gives the diagonal logdet") {
    f.ch.g_sense.setZero();
    f.ch.c_clutter.setZero();
    const DesignPoint d = f.random_design(43, 0.5);
    const double expect =
        f.cfg.n_antennas * std::log2((f.noise.rx[0] + 0.5) / 0.5);
    CHECK(fronthaul_rate_rx(d, f.ch, 0, f.noise.rx) ==
          doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("rate decays to zero with coarse quantization") {
    DesignPoint d = f.random_design(44);
    double prev = 1e300;
    for (const double q : {1.0, 10.0, 100.0}) {
      d.q_rx.setConstant(q);
      const double r = fronthaul_rate_rx(d, f.ch, 0, f.noise.rx);
      CHECK(r < prev);
      CHECK(r >= 0.0);
      prev = r;
    }
  }
  SUBCASE("nonpositive quantization level is rejected") {
    DesignPoint d = f.zero_design();
    d.q_rx(0) = -1.0;
    CHECK_THROWS_AS(fronthaul_rate_rx(d, f.ch, 0, f.noise.rx),
                    std::invalid_argument);
  }
}

TEST_CASE("feasibility report covers all constraints") {
  Fixture f;
  SUBCASE("zero beams with tiny quantization pass at zero secrecy floor") {
    Budgets b = Budgets::from(f.cfg);
    b.secrecy_floor = 0.0;
    DesignPoint d = f.zero_design(1e-6);
    d.q_rx.setConstant(10.0);  // coarse RX quantization keeps (8d) slack
    const FeasibilityReport rep = check_feasibility(d, f.ch, b, f.noise, 1e-9);
    CHECK(rep.all_pass);
    CHECK(rep.checks.size() == 1 + 2 + 2 + 2);  // secrecy, fh_tx, fh_rx, power
  }
  SUBCASE("vanishing power budget fails the power constraint") {
    Budgets b = Budgets::from(f.cfg);
    b.power = 1e-12;
    b.secrecy_floor = 0.0;
    const DesignPoint d = f.random_design(51);
    const FeasibilityReport rep = check_feasibility(d, f.ch, b, f.noise, 1e-9);
    CHECK_FALSE(rep.all_pass);
    bool power_failed = false;
    for (const auto& c : rep.checks) {
      if (c.name.rfind("power", 0) == 0 && !c.pass) power_failed = true;
    }
    CHECK(power_failed);
  }
}
