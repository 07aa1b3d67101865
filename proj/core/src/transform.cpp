#include "isac/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kLogFloor = 1e-12;

double checked_log2(double x, const char* where) {
  if (x < kLogFloor) {
    throw std::domain_error(std::string(where) + ": nonpositive log argument");
  }
  return std::log2(x);
}

double log2det_pd(const Eigen::MatrixXcd& m, const char* where) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error(std::string(where) + ": matrix not positive definite");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    acc += std::log(llt.matrixLLT()(i, i).real());
  }
  return 2.0 * acc / kLn2;
}

/// h^H (sum Gamma_{k' in S} + Omega^TX) h + z*var, with S = all or all\k.
double quad_form(const TransformedPoint& theta, const Eigen::VectorXcd& h,
                 int excluded_k, double var, int n_antennas) {
  double acc = 0.0;
  for (int k = 0; k < static_cast<int>(theta.gamma.size()); ++k) {
    if (k == excluded_k) continue;
    acc += (h.adjoint() * theta.gamma[k] * h).value().real();
  }
  for (Eigen::Index i = 0; i < theta.omega_tx.size(); ++i) {
    acc += theta.omega_tx(i) *
           h.segment(i * n_antennas, n_antennas).squaredNorm();
  }
  return acc + theta.z * var;
}

}  // namespace

Eigen::MatrixXcd TransformedPoint::gamma_total(int n_antennas) const {
  Eigen::MatrixXcd total =
      Eigen::MatrixXcd::Zero(gamma[0].rows(), gamma[0].cols());
  for (const auto& g : gamma) total += g;
  for (Eigen::Index i = 0; i < omega_tx.size(); ++i) {
    for (int a = 0; a < n_antennas; ++a) {
      total(i * n_antennas + a, i * n_antennas + a) += omega_tx(i);
    }
  }
  return total;
}

double TransformedPoint::norm() const {
  double acc = z * z + omega_tx.squaredNorm() + omega_rx.squaredNorm();
  for (const auto& g : gamma) acc += g.squaredNorm();
  return std::sqrt(acc);
}

double TransformedPoint::distance(const TransformedPoint& other) const {
  double acc = (z - other.z) * (z - other.z) +
               (omega_tx - other.omega_tx).squaredNorm() +
               (omega_rx - other.omega_rx).squaredNorm();
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    acc += (gamma[k] - other.gamma[k]).squaredNorm();
  }
  return std::sqrt(acc);
}

double xi_denominator(const std::vector<Eigen::MatrixXcd>& v,
                      const Eigen::VectorXd& q_tx, const Eigen::VectorXd& q_rx,
                      const ChannelSet& ch, const std::vector<double>& var_noise_rx) {
  const int na = ch.n_antennas;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(ch.tx_dim(), ch.tx_dim());
  for (const auto& vk : v) total += vk;
  for (Eigen::Index i = 0; i < q_tx.size(); ++i) {
    for (int a = 0; a < na; ++a) total(i * na + a, i * na + a) += q_tx(i);
  }
  double acc = (ch.c_clutter * total * ch.c_clutter.adjoint()).real().trace();
  for (int j = 0; j < ch.n_rx; ++j) {
    acc += na * (var_noise_rx[j] + q_rx(j));
  }
  return acc;
}

TransformedPoint to_transformed(const std::vector<Eigen::MatrixXcd>& v,
                                const Eigen::VectorXd& q_tx,
                                const Eigen::VectorXd& q_rx, const ChannelSet& ch,
                                const std::vector<double>& var_noise_rx) {
  const double xi = xi_denominator(v, q_tx, q_rx, ch, var_noise_rx);
  if (xi <= 0.0) {
    throw std::domain_error("to_transformed: nonpositive denominator");
  }
  TransformedPoint theta;
  theta.gamma.reserve(v.size());
  for (const auto& vk : v) theta.gamma.push_back(vk / xi);
  theta.omega_tx = q_tx / xi;
  theta.omega_rx = q_rx / xi;
  theta.z = 1.0 / xi;
  return theta;
}

SdrPoint from_transformed(const TransformedPoint& theta) {
  if (theta.z <= 0.0) {
    throw std::domain_error("from_transformed: z must be > 0");
  }
  SdrPoint p;
  p.v.reserve(theta.gamma.size());
  for (const auto& g : theta.gamma) p.v.push_back(g / theta.z);
  p.q_tx = theta.omega_tx / theta.z;
  p.q_rx = theta.omega_rx / theta.z;
  return p;
}

double logdet_tangent(const Eigen::MatrixXcd& x1, const Eigen::MatrixXcd& x2) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols()) {
    throw std::invalid_argument("logdet_tangent: shape mismatch");
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(x1);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("logdet_tangent: x1 not positive definite");
  }
  const double base = log2det_pd(x1, "logdet_tangent");
  const Eigen::MatrixXcd corr = llt.solve(x2 - x1);
  return base + corr.real().trace() / kLn2;
}

double normalization_residual(const TransformedPoint& theta, const ChannelSet& ch,
                              const std::vector<double>& var_noise_rx) {
  const Eigen::MatrixXcd total = theta.gamma_total(ch.n_antennas);
  double acc = (ch.c_clutter * total * ch.c_clutter.adjoint()).real().trace();
  for (int j = 0; j < ch.n_rx; ++j) {
    acc += theta.z * ch.n_antennas * var_noise_rx[j] +
           ch.n_antennas * theta.omega_rx(j);
  }
  return acc - 1.0;
}

double transformed_objective(const TransformedPoint& theta, const ChannelSet& ch) {
  const Eigen::MatrixXcd total = theta.gamma_total(ch.n_antennas);
  return (ch.g_sense * total * ch.g_sense.adjoint()).real().trace();
}

double transformed_secrecy_rate(const TransformedPoint& theta, const ChannelSet& ch,
                                const NoiseLevels& noise, int k) {
  const Eigen::VectorXcd hk = ch.h_users.col(k);
  const double a_k = quad_form(theta, hk, -1, noise.user, ch.n_antennas);
  const double b_k = quad_form(theta, hk, k, noise.user, ch.n_antennas);
  const double e_all = quad_form(theta, ch.h_eve, -1, noise.eve, ch.n_antennas);
  const double e_k = quad_form(theta, ch.h_eve, k, noise.eve, ch.n_antennas);
  return checked_log2(a_k, "transformed_secrecy_rate") -
         checked_log2(b_k, "transformed_secrecy_rate") -
         checked_log2(e_all, "transformed_secrecy_rate") +
         checked_log2(e_k, "transformed_secrecy_rate");
}

Eigen::MatrixXcd tx_block_of(const TransformedPoint& theta, int n_antennas, int i) {
  const Eigen::Index off = static_cast<Eigen::Index>(i) * n_antennas;
  Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(n_antennas, n_antennas);
  for (const auto& g : theta.gamma) blk += g.block(off, off, n_antennas, n_antennas);
  blk.diagonal().array() += theta.omega_tx(i);
  return blk;
}

Eigen::MatrixXcd rx_cov_of(const TransformedPoint& theta, const ChannelSet& ch,
                           const std::vector<double>& var_noise_rx, int j) {
  const Eigen::MatrixXcd f = ch.g_block_row(j) + ch.c_block_row(j);
  Eigen::MatrixXcd cov = f * theta.gamma_total(ch.n_antennas) * f.adjoint();
  cov.diagonal().array() += theta.z * var_noise_rx[j] + theta.omega_rx(j);
  return cov;
}

double transformed_fronthaul_tx(const TransformedPoint& theta, const ChannelSet& ch,
                                int i) {
  const Eigen::MatrixXcd blk = tx_block_of(theta, ch.n_antennas, i);
  return log2det_pd(blk, "transformed_fronthaul_tx") -
         ch.n_antennas * checked_log2(theta.omega_tx(i), "transformed_fronthaul_tx");
}

double transformed_fronthaul_rx(const TransformedPoint& theta, const ChannelSet& ch,
                                const std::vector<double>& var_noise_rx, int j) {
  const Eigen::MatrixXcd cov = rx_cov_of(theta, ch, var_noise_rx, j);
  return log2det_pd(cov, "transformed_fronthaul_rx") -
         ch.n_antennas * checked_log2(theta.omega_rx(j), "transformed_fronthaul_rx");
}

double secrecy_surrogate(const TransformedPoint& theta, const TransformedPoint& anchor,
                         const ChannelSet& ch, const NoiseLevels& noise, int k) {
  const Eigen::VectorXcd hk = ch.h_users.col(k);
  const int na = ch.n_antennas;

  const double a_k = quad_form(theta, hk, -1, noise.user, na);
  const double e_k = quad_form(theta, ch.h_eve, k, noise.eve, na);

  const double b_anchor = quad_form(anchor, hk, k, noise.user, na);
  const double e_anchor = quad_form(anchor, ch.h_eve, -1, noise.eve, na);
  if (b_anchor < kLogFloor || e_anchor < kLogFloor) {
    throw std::domain_error("secrecy_surrogate: anchor not strictly feasible");
  }

  const double b_theta = quad_form(theta, hk, k, noise.user, na);
  const double e_theta = quad_form(theta, ch.h_eve, -1, noise.eve, na);

  const double f = std::log2(b_anchor) + std::log2(e_anchor) +
                   (b_theta / b_anchor - 1.0) / kLn2 +
                   (e_theta / e_anchor - 1.0) / kLn2;

  return checked_log2(a_k, "secrecy_surrogate") +
         checked_log2(e_k, "secrecy_surrogate") - f;
}

double fronthaul_tx_surrogate(const TransformedPoint& theta,
                              const TransformedPoint& anchor, const ChannelSet& ch,
                              int i) {
  const Eigen::MatrixXcd anchor_blk = tx_block_of(anchor, ch.n_antennas, i);
  const Eigen::MatrixXcd blk = tx_block_of(theta, ch.n_antennas, i);
  return logdet_tangent(anchor_blk, blk) -
         ch.n_antennas * checked_log2(theta.omega_tx(i), "fronthaul_tx_surrogate");
}

double fronthaul_rx_surrogate(const TransformedPoint& theta,
                              const TransformedPoint& anchor, const ChannelSet& ch,
                              const std::vector<double>& var_noise_rx, int j) {
  const Eigen::MatrixXcd anchor_cov = rx_cov_of(anchor, ch, var_noise_rx, j);
  const Eigen::MatrixXcd cov = rx_cov_of(theta, ch, var_noise_rx, j);
  return logdet_tangent(anchor_cov, cov) -
         ch.n_antennas * checked_log2(theta.omega_rx(j), "fronthaul_rx_surrogate");
}

}  // namespace isac
