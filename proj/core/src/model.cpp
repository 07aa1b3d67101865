#include "isac/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double log2det_hermitian(const Eigen::MatrixXcd& m) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("log2det: matrix not positive definite");
  }
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    acc += std::log(l(i, i).real());
  }
  return 2.0 * acc / kLn2;
}

void check_index(int idx, int n, const char* what) {
  if (idx < 0 || idx >= n) {
    throw std::out_of_range(std::string(what) + " index out of range");
  }
}

}  // namespace

Eigen::MatrixXcd DesignPoint::tx_covariance(int n_antennas) const {
  Eigen::MatrixXcd t = beam * beam.adjoint();
  for (Eigen::Index i = 0; i < q_tx.size(); ++i) {
    for (int a = 0; a < n_antennas; ++a) {
      t(i * n_antennas + a, i * n_antennas + a) += q_tx(i);
    }
  }
  return t;
}

void DesignPoint::validate(const ChannelSet& ch) const {
  if (beam.rows() != ch.tx_dim() || beam.cols() != ch.n_users) {
    throw std::invalid_argument("DesignPoint: beam dimensions inconsistent");
  }
  if (q_tx.size() != ch.n_tx || q_rx.size() != ch.n_rx) {
    throw std::invalid_argument("DesignPoint: quantization vector sizes inconsistent");
  }
  if ((q_tx.array() <= 0.0).any() || (q_rx.array() <= 0.0).any()) {
    throw std::invalid_argument("DesignPoint: quantization variances must be > 0");
  }
}

double transmit_power(const DesignPoint& design, const ChannelSet& ch, int i) {
  check_index(i, ch.n_tx, "TX");
  const Eigen::MatrixXcd wi = design.tx_block(i, ch.n_antennas);
  return wi.squaredNorm() + ch.n_antennas * design.q_tx(i);
}

namespace {

double sinr_at(const DesignPoint& design, const ChannelSet& ch,
               const Eigen::VectorXcd& h, int k, double var_noise) {
  const Eigen::VectorXcd hw = design.beam.adjoint() * h;  // entries h^H w_k'
  const double signal = std::norm(hw(k));
  double denom = var_noise;
  for (Eigen::Index kk = 0; kk < hw.size(); ++kk) {
    if (kk != k) denom += std::norm(hw(kk));
  }
  for (int i = 0; i < ch.n_tx; ++i) {
    denom += design.q_tx(i) *
             h.segment(static_cast<Eigen::Index>(i) * ch.n_antennas, ch.n_antennas)
                 .squaredNorm();
  }
  return signal / denom;
}

}  // namespace

double user_sinr(const DesignPoint& design, const ChannelSet& ch, int k,
                 double var_noise_user) {
  check_index(k, ch.n_users, "user");
  return sinr_at(design, ch, ch.h_users.col(k), k, var_noise_user);
}

double eve_sinr(const DesignPoint& design, const ChannelSet& ch, int k,
                double var_noise_eve) {
  check_index(k, ch.n_users, "user");
  return sinr_at(design, ch, ch.h_eve, k, var_noise_eve);
}

double secrecy_rate(const DesignPoint& design, const ChannelSet& ch,
                    const NoiseLevels& noise) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.n_users; ++k) {
    const double rk = std::log2(1.0 + user_sinr(design, ch, k, noise.user));
    const double re = std::log2(1.0 + eve_sinr(design, ch, k, noise.eve));
    worst = std::min(worst, rk - re);
  }
  return std::max(worst, 0.0);
}

double sensing_sinr(const DesignPoint& design, const ChannelSet& ch,
                    const std::vector<double>& var_noise_rx) {
  if (static_cast<int>(var_noise_rx.size()) != ch.n_rx) {
    throw std::invalid_argument("sensing_sinr: noise list size != n_rx");
  }
  const Eigen::MatrixXcd t = design.tx_covariance(ch.n_antennas);
  const double num = (ch.g_sense * t * ch.g_sense.adjoint()).real().trace();
  double den = (ch.c_clutter * t * ch.c_clutter.adjoint()).real().trace();
  for (int j = 0; j < ch.n_rx; ++j) {
    den += ch.n_antennas * (var_noise_rx[j] + design.q_rx(j));
  }
  return num / den;
}

double fronthaul_rate_tx(const DesignPoint& design, const ChannelSet& ch, int i) {
  check_index(i, ch.n_tx, "TX");
  if (design.q_tx(i) <= 0.0) {
    throw std::invalid_argument("fronthaul_rate_tx: q_tx must be > 0");
  }
  const Eigen::MatrixXcd wi = design.tx_block(i, ch.n_antennas);
  Eigen::MatrixXcd arg = wi * wi.adjoint();
  arg.diagonal().array() += design.q_tx(i);
  return log2det_hermitian(arg) - ch.n_antennas * std::log2(design.q_tx(i));
}

double fronthaul_rate_rx(const DesignPoint& design, const ChannelSet& ch, int j,
                         const std::vector<double>& var_noise_rx) {
  check_index(j, ch.n_rx, "RX");
  if (design.q_rx(j) <= 0.0) {
    throw std::invalid_argument("fronthaul_rate_rx: q_rx must be > 0");
  }
  const Eigen::MatrixXcd f = ch.g_block_row(j) + ch.c_block_row(j);
  const Eigen::MatrixXcd t = design.tx_covariance(ch.n_antennas);
  Eigen::MatrixXcd arg = f * t * f.adjoint();
  arg.diagonal().array() += var_noise_rx[j] + design.q_rx(j);
  return log2det_hermitian(arg) - ch.n_antennas * std::log2(design.q_rx(j));
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ": " << c.value << (c.is_upper ? " <= " : " >= ") << c.bound
       << (c.pass ? " [pass]" : " [FAIL]") << "\n";
  }
  return os.str();
}

FeasibilityReport check_feasibility(const DesignPoint& design, const ChannelSet& ch,
                                    const Budgets& budgets, const NoiseLevels& noise,
                                    double tol) {
  if (tol < 0.0) throw std::invalid_argument("check_feasibility: tol must be >= 0");
  design.validate(ch);

  FeasibilityReport rep;
  auto add = [&](std::string name, double value, double bound, bool is_upper) {
    const double slack = tol * std::max(1.0, std::abs(bound));
    const bool pass = is_upper ? value <= bound + slack : value >= bound - slack;
    rep.checks.push_back({std::move(name), value, bound, is_upper, pass});
    rep.all_pass = rep.all_pass && pass;
  };

  add("secrecy_rate", secrecy_rate(design, ch, noise), budgets.secrecy_floor, false);
  for (int i = 0; i < ch.n_tx; ++i) {
    add("fronthaul_tx[" + std::to_string(i) + "]", fronthaul_rate_tx(design, ch, i),
        budgets.cap_tx, true);
  }
  for (int j = 0; j < ch.n_rx; ++j) {
    add("fronthaul_rx[" + std::to_string(j) + "]",
        fronthaul_rate_rx(design, ch, j, noise.rx), budgets.cap_rx, true);
  }
  for (int i = 0; i < ch.n_tx; ++i) {
    add("power[" + std::to_string(i) + "]", transmit_power(design, ch, i),
        budgets.power, true);
  }
  return rep;
}

}  // namespace isac
