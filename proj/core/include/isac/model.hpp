#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/// Beamformers plus transmit/receive quantization noise variances: the
/// decision variables of the joint design problem.
struct DesignPoint {
  Eigen::MatrixXcd beam;    // tx_dim x K, column k is w_k; rows partition per TX
  Eigen::VectorXd q_tx;     // N_T variances, Q_i^TX = q_tx(i) * I
  Eigen::VectorXd q_rx;     // N_R variances, Q_j^RX = q_rx(j) * I

  int n_users() const { return static_cast<int>(beam.cols()); }

  /// Beamforming rows of TX i (n_antennas x K).
  Eigen::MatrixXcd tx_block(int i, int n_antennas) const {
    return beam.middleRows(static_cast<Eigen::Index>(i) * n_antennas, n_antennas);
  }

  /// Full tx_dim x tx_dim transmit covariance W W^H + Q^TX.
  Eigen::MatrixXcd tx_covariance(int n_antennas) const;

  /// Throws std::invalid_argument if variances are not strictly positive or
  /// dimensions are inconsistent with the channel set.
  void validate(const ChannelSet& ch) const;
};

/// Constraint right-hand sides, projected out of ScenarioConfig.
struct Budgets {
  double power = 0.0;          // per-TX power cap
  double cap_tx = 0.0;         // TX fronthaul capacity, bits/symbol
  double cap_rx = 0.0;         // RX fronthaul capacity, bits/symbol
  double secrecy_floor = 0.0;  // required worst-case secrecy rate

  static Budgets from(const ScenarioConfig& c) {
    return {c.power_budget, c.cap_tx, c.cap_rx, c.secrecy_floor};
  }
};

/// Per-user and Eve noise variances bundled for the evaluators.
struct NoiseLevels {
  double user = 0.0;             // sigma_k^2 (equal across users)
  double eve = 0.0;              // sigma_E^2
  std::vector<double> rx;        // sigma_{y,j}^2 per RX

  static NoiseLevels from(const ScenarioConfig& c) {
    return {c.var_noise_user, c.var_noise_eve,
            std::vector<double>(static_cast<std::size_t>(c.n_rx), c.var_noise_rx)};
  }
};

/// tr(W_i W_i^H) + N_A * q_tx(i).
double transmit_power(const DesignPoint& design, const ChannelSet& ch, int i);

/// Downlink SINR of user k.
double user_sinr(const DesignPoint& design, const ChannelSet& ch, int k,
                 double var_noise_user);

/// SINR of the signal of user k leaked to the eavesdropper.
double eve_sinr(const DesignPoint& design, const ChannelSet& ch, int k,
                double var_noise_eve);

/// Worst-case secrecy rate min_k [log2(1+g_k) - log2(1+g_Ek)]^+, bits/symbol.
double secrecy_rate(const DesignPoint& design, const ChannelSet& ch,
                    const NoiseLevels& noise);

/// Target power over clutter + noise + quantization power at the CU.
double sensing_sinr(const DesignPoint& design, const ChannelSet& ch,
                    const std::vector<double>& var_noise_rx);

/// Rate-distortion fronthaul rate toward TX i, bits/symbol.
double fronthaul_rate_tx(const DesignPoint& design, const ChannelSet& ch, int i);

/// Rate-distortion fronthaul rate from RX j, bits/symbol.
double fronthaul_rate_rx(const DesignPoint& design, const ChannelSet& ch, int j,
                         const std::vector<double>& var_noise_rx);

struct ConstraintCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool is_upper = true;  // true: value <= bound; false: value >= bound
  bool pass = false;
};

struct FeasibilityReport {
  std::vector<ConstraintCheck> checks;
  bool all_pass = true;
  std::string summary() const;
};

/// Evaluates every constraint of the joint design problem at relative slack tol.
FeasibilityReport check_feasibility(const DesignPoint& design, const ChannelSet& ch,
                                    const Budgets& budgets, const NoiseLevels& noise,
                                    double tol);

}  // namespace isac
