#include "isac/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isac {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ScenarioConfig: " + what);
}

Point2D sample_in_region(const Region& r, Rng& rng) {
  const double u = uniform01(rng);
  const double v = uniform01(rng);
  return {r.center.x + (u - 0.5) * r.side, r.center.y + (v - 0.5) * r.side};
}

/// Rician channel from one TX toward a terminal at geometric angle theta.
Eigen::VectorXcd rician_channel(double theta, int n_antennas, double rician_factor,
                                Rng& rng) {
  const double w_los = std::sqrt(rician_factor / (rician_factor + 1.0));
  const double w_nlos = std::sqrt(1.0 / (rician_factor + 1.0));
  Eigen::VectorXcd h = w_los * steering_vector(theta, n_antennas);
  for (int m = 0; m < n_antennas; ++m) {
    h(m) += w_nlos * complex_gaussian(rng);
  }
  return h;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_tx >= 1 && n_rx >= 1 && n_users >= 1 && n_antennas >= 1,
          "all counts must be >= 1");
  require(static_cast<int>(tx_positions.size()) == n_tx, "tx_positions size != n_tx");
  require(static_cast<int>(rx_positions.size()) == n_rx, "rx_positions size != n_rx");
  require(static_cast<int>(user_regions.size()) == n_users,
          "user_regions size != n_users");
  require(var_scatter >= 0.0, "var_scatter must be >= 0");
  require(var_clutter > 0.0 && var_noise_user > 0.0 && var_noise_eve > 0.0 &&
              var_noise_rx > 0.0,
          "all variances must be > 0");
  require(rician_factor >= 0.0, "rician_factor must be >= 0");
  require(power_budget > 0.0, "power_budget must be > 0");
  require(cap_tx > 0.0 && cap_rx > 0.0, "fronthaul capacities must be > 0");
  require(secrecy_floor >= 0.0, "secrecy_floor must be >= 0");
  require(n_symbols >= 1, "n_symbols must be >= 1");
}

namespace {

ChannelSet draw_impl(const ScenarioConfig& config, Rng& rng, bool los_only,
                     const std::vector<Point2D>* fixed_users) {
  config.validate();

  ChannelSet ch;
  ch.n_tx = config.n_tx;
  ch.n_rx = config.n_rx;
  ch.n_users = config.n_users;
  ch.n_antennas = config.n_antennas;

  const int na = config.n_antennas;
  const int td = config.tx_dim();
  const int rd = config.rx_dim();

  ch.eve_position = sample_in_region(config.eve_region, rng);
  ch.user_positions.resize(config.n_users);
  for (int k = 0; k < config.n_users; ++k) {
    ch.user_positions[k] = fixed_users ? (*fixed_users)[k]
                                       : sample_in_region(config.user_regions[k], rng);
  }

  const double rician = los_only ? 1e18 : config.rician_factor;

  ch.h_users.resize(td, config.n_users);
  for (int k = 0; k < config.n_users; ++k) {
    for (int i = 0; i < config.n_tx; ++i) {
      const double theta = angle_between(config.tx_positions[i], ch.user_positions[k]);
      ch.h_users.col(k).segment(static_cast<Eigen::Index>(i) * na, na) =
          rician_channel(theta, na, rician, rng);
    }
  }

  ch.h_eve.resize(td);
  for (int i = 0; i < config.n_tx; ++i) {
    const double theta = angle_between(config.tx_positions[i], ch.eve_position);
    ch.h_eve.segment(static_cast<Eigen::Index>(i) * na, na) =
        rician_channel(theta, na, rician, rng);
  }

  ch.tx_aod.resize(config.n_tx);
  for (int i = 0; i < config.n_tx; ++i) {
    ch.tx_aod[i] = angle_between(config.tx_positions[i], ch.eve_position);
  }
  ch.rx_aoa.resize(config.n_rx);
  for (int j = 0; j < config.n_rx; ++j) {
    ch.rx_aoa[j] = angle_between(config.rx_positions[j], ch.eve_position);
  }

  ch.g_sense = Eigen::MatrixXcd::Zero(rd, td);
  for (int j = 0; j < config.n_rx; ++j) {
    const Eigen::VectorXcd a_rx = steering_vector(ch.rx_aoa[j], na);
    for (int i = 0; i < config.n_tx; ++i) {
      const std::complex<double> alpha = complex_gaussian(rng, config.var_scatter);
      const Eigen::VectorXcd a_tx = steering_vector(ch.tx_aod[i], na);
      // outer product with plain transpose on the departure side
      ch.g_sense.block(static_cast<Eigen::Index>(j) * na,
                       static_cast<Eigen::Index>(i) * na, na, na) =
          alpha * (a_rx * a_tx.transpose());
    }
  }

  ch.c_clutter.resize(rd, td);
  for (Eigen::Index r = 0; r < rd; ++r) {
    for (Eigen::Index c = 0; c < td; ++c) {
      ch.c_clutter(r, c) = complex_gaussian(rng, config.var_clutter);
    }
  }

  return ch;
}

}  // namespace

ChannelSet draw_channels(const ScenarioConfig& config, Rng& rng) {
  return draw_impl(config, rng, false, nullptr);
}

ChannelSet draw_channels_los(const ScenarioConfig& config,
                             const std::vector<Point2D>& user_positions, Rng& rng) {
  if (static_cast<int>(user_positions.size()) != config.n_users) {
    throw std::invalid_argument("draw_channels_los: user_positions size != n_users");
  }
  return draw_impl(config, rng, true, &user_positions);
}

}  // namespace isac
