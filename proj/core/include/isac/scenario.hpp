#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isac/geometry.hpp"
#include "isac/rng.hpp"

namespace isac {

/// All counts, geometry, statistical parameters and budgets defining one
/// experiment instance.
struct ScenarioConfig {
  int n_tx = 2;        // transmit RRHs
  int n_rx = 2;        // receive RRHs
  int n_users = 2;     // single-antenna users
  int n_antennas = 2;  // ULA elements per RRH

  std::vector<Point2D> tx_positions;
  std::vector<Point2D> rx_positions;
  std::vector<Region> user_regions;  // one square per user
  Region eve_region;

  double rician_factor = 5.0;
  double var_scatter = 1e-3;     // scattering coefficient variance (per TX/RX pair)
  double var_clutter = 1e-3;     // clutter entry variance
  double var_noise_user = 0.1;   // AWGN at each user
  double var_noise_eve = 0.1;    // AWGN at the eavesdropper
  double var_noise_rx = 0.1;     // AWGN per receive antenna
  double power_budget = 5.0;     // per-TX power cap (Watts)
  double cap_tx = 5.0;           // TX fronthaul capacity (bits/symbol)
  double cap_rx = 3.0;           // RX fronthaul capacity (bits/symbol)
  double secrecy_floor = 0.5;    // required worst-case secrecy rate
  int n_symbols = 30;            // sensing duration M
  std::uint64_t seed = 0;

  int tx_dim() const { return n_tx * n_antennas; }
  int rx_dim() const { return n_rx * n_antennas; }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// One realization of all channels.
struct ChannelSet {
  int n_tx = 0, n_rx = 0, n_users = 0, n_antennas = 0;

  Eigen::MatrixXcd h_users;   // tx_dim x K, column k is the stacked h_k
  Eigen::VectorXcd h_eve;     // tx_dim
  Eigen::MatrixXcd g_sense;   // rx_dim x tx_dim, block (j,i) = alpha_{j,i} a(theta_j) a(theta_i)^T
  Eigen::MatrixXcd c_clutter; // rx_dim x tx_dim, i.i.d. CN(0, var_clutter)

  std::vector<double> tx_aod;  // departure angle of each TX toward the target
  std::vector<double> rx_aoa;  // arrival angle at each RX from the target

  std::vector<Point2D> user_positions;
  Point2D eve_position;

  int tx_dim() const { return n_tx * n_antennas; }
  int rx_dim() const { return n_rx * n_antennas; }

  /// j-th block row of g_sense (n_antennas x tx_dim).
  Eigen::MatrixXcd g_block_row(int j) const {
    return g_sense.middleRows(static_cast<Eigen::Index>(j) * n_antennas, n_antennas);
  }
  Eigen::MatrixXcd c_block_row(int j) const {
    return c_clutter.middleRows(static_cast<Eigen::Index>(j) * n_antennas, n_antennas);
  }
};

/// Draws one channel realization. Deterministic given the RNG state; user and
/// Eve positions are sampled uniformly in their configured squares.
ChannelSet draw_channels(const ScenarioConfig& config, Rng& rng);

/// Variant forcing pure-LOS communication channels with fixed user positions,
/// used by the user-angle sweep preset.
ChannelSet draw_channels_los(const ScenarioConfig& config,
                             const std::vector<Point2D>& user_positions,
                             Rng& rng);

}  // namespace isac
