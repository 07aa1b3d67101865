#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isac/model.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Fractional-transform variables: the SDR covariances and quantization
/// variances divided by the sensing-SINR denominator, plus z = 1/denominator.
struct TransformedPoint {
  std::vector<Eigen::MatrixXcd> gamma;  // K Hermitian PSD, tx_dim x tx_dim
  Eigen::VectorXd omega_tx;             // N_T positive scalars
  Eigen::VectorXd omega_rx;             // N_R positive scalars
  double z = 0.0;

  /// Sum of all gamma matrices plus the block-diagonal omega_tx terms.
  Eigen::MatrixXcd gamma_total(int n_antennas) const;

  /// Euclidean norm of the concatenation of all entries (re/im), the omega
  /// scalars and z; the MM convergence metric operates on differences.
  double norm() const;

  double distance(const TransformedPoint& other) const;
};

/// Sensing-SINR denominator at an (SDR covariance, quantization) point.
double xi_denominator(const std::vector<Eigen::MatrixXcd>& v,
                      const Eigen::VectorXd& q_tx, const Eigen::VectorXd& q_rx,
                      const ChannelSet& ch, const std::vector<double>& var_noise_rx);

/// Divides all variables by the denominator; the result satisfies the
/// normalization equality by construction.
TransformedPoint to_transformed(const std::vector<Eigen::MatrixXcd>& v,
                                const Eigen::VectorXd& q_tx,
                                const Eigen::VectorXd& q_rx, const ChannelSet& ch,
                                const std::vector<double>& var_noise_rx);

struct SdrPoint {
  std::vector<Eigen::MatrixXcd> v;
  Eigen::VectorXd q_tx;
  Eigen::VectorXd q_rx;
};

/// Inverse transform; throws on z <= 0.
SdrPoint from_transformed(const TransformedPoint& theta);

/// First-order expansion of log2 det at x1 evaluated at x2:
/// log2 det(x1) + tr(x1^{-1} (x2 - x1)) / ln 2.
double logdet_tangent(const Eigen::MatrixXcd& x1, const Eigen::MatrixXcd& x2);

/// Residual of the normalization equality (should be ~0 for valid points).
double normalization_residual(const TransformedPoint& theta, const ChannelSet& ch,
                              const std::vector<double>& var_noise_rx);

/// Linear sensing objective tr(G (sum Gamma + Omega^TX) G^H).
double transformed_objective(const TransformedPoint& theta, const ChannelSet& ch);

// --- exact constraint functions in transformed variables -------------------

/// Secrecy rate of user k in transformed variables (no [.]^+, per-user).
double transformed_secrecy_rate(const TransformedPoint& theta, const ChannelSet& ch,
                                const NoiseLevels& noise, int k);

/// Exact TX fronthaul rate in transformed variables (scale-invariant form).
double transformed_fronthaul_tx(const TransformedPoint& theta, const ChannelSet& ch,
                                int i);

/// Exact RX fronthaul rate in transformed variables.
double transformed_fronthaul_rx(const TransformedPoint& theta, const ChannelSet& ch,
                                const std::vector<double>& var_noise_rx, int j);

// --- MM surrogates ----------------------------------------------------------

/// Concave lower bound on the transformed secrecy rate, tight at the anchor.
double secrecy_surrogate(const TransformedPoint& theta, const TransformedPoint& anchor,
                         const ChannelSet& ch, const NoiseLevels& noise, int k);

/// Convex upper bound on the transformed TX fronthaul rate, tight at the anchor.
double fronthaul_tx_surrogate(const TransformedPoint& theta,
                              const TransformedPoint& anchor, const ChannelSet& ch,
                              int i);

/// Convex upper bound on the transformed RX fronthaul rate, tight at the anchor.
double fronthaul_rx_surrogate(const TransformedPoint& theta,
                              const TransformedPoint& anchor, const ChannelSet& ch,
                              const std::vector<double>& var_noise_rx, int j);

/// i-th diagonal block (n_antennas x n_antennas) of sum Gamma + omega_tx(i) I.
Eigen::MatrixXcd tx_block_of(const TransformedPoint& theta, int n_antennas, int i);

/// RX-side covariance argument a(Theta) for block j.
Eigen::MatrixXcd rx_cov_of(const TransformedPoint& theta, const ChannelSet& ch,
                           const std::vector<double>& var_noise_rx, int j);

}  // namespace isac
