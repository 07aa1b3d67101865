#include "isac/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace isac {

namespace {

double lndet_pd(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < llt.matrixLLT().rows(); ++i) {
    acc += std::log(llt.matrixLLT()(i, i).real());
  }
  return 2.0 * acc;
}

Eigen::VectorXcd standard_complex_gaussian(Eigen::Index n, Rng& rng) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_gaussian(rng);
  return v;
}

/// Empirical ROC from per-hypothesis statistic samples via a full threshold
/// sweep (non-decreasing step curve from (0,0) to (1,1)).
ROCCurve sweep_roc(std::vector<double> s0, std::vector<double> s1) {
  const int n = static_cast<int>(s0.size());
  std::sort(s0.begin(), s0.end(), std::greater<>());
  std::sort(s1.begin(), s1.end(), std::greater<>());

  ROCCurve roc;
  roc.n_trials = n;
  roc.p_fa.push_back(0.0);
  roc.p_de.push_back(0.0);
  std::size_t i0 = 0, i1 = 0;
  while (i0 < s0.size() || i1 < s1.size()) {
    double tau;
    if (i0 < s0.size() && i1 < s1.size()) {
      tau = std::max(s0[i0], s1[i1]);
    } else if (i0 < s0.size()) {
      tau = s0[i0];
    } else {
      tau = s1[i1];
    }
    while (i0 < s0.size() && s0[i0] >= tau) ++i0;
    while (i1 < s1.size() && s1[i1] >= tau) ++i1;
    roc.p_fa.push_back(static_cast<double>(i0) / n);
    roc.p_de.push_back(static_cast<double>(i1) / n);
  }
  if (roc.p_fa.back() != 1.0 || roc.p_de.back() != 1.0) {
    roc.p_fa.push_back(1.0);
    roc.p_de.push_back(1.0);
  }
  return roc;
}

}  // namespace

HypothesisPair hypothesis_covariances(const DesignPoint& design, const ChannelSet& ch,
                                      const std::vector<double>& var_noise_rx,
                                      DetectionMode mode, int local_j,
                                      bool include_rx_quantization) {
  const Eigen::MatrixXcd t = design.tx_covariance(ch.n_antennas);

  auto assemble = [&](const Eigen::MatrixXcd& target_ch,
                      const Eigen::MatrixXcd& clutter_ch, int first_rx,
                      int n_rx) {
    Eigen::MatrixXcd s1 =
        (target_ch + clutter_ch) * t * (target_ch + clutter_ch).adjoint();
    Eigen::MatrixXcd s0 = clutter_ch * t * clutter_ch.adjoint();
    for (int j = 0; j < n_rx; ++j) {
      const double extra =
          var_noise_rx[first_rx + j] +
          (include_rx_quantization ? design.q_rx(first_rx + j) : 0.0);
      for (int a = 0; a < ch.n_antennas; ++a) {
        const Eigen::Index d = static_cast<Eigen::Index>(j) * ch.n_antennas + a;
        s1(d, d) += extra;
        s0(d, d) += extra;
      }
    }
    return HypothesisPair{std::move(s0), std::move(s1)};
  };

  if (mode == DetectionMode::Centralized) {
    return assemble(ch.g_sense, ch.c_clutter, 0, ch.n_rx);
  }
  if (local_j < 0 || local_j >= ch.n_rx) {
    throw std::out_of_range("hypothesis_covariances: local RX index out of range");
  }
  return assemble(ch.g_block_row(local_j), ch.c_block_row(local_j), local_j, 1);
}

double llr_statistic(const std::vector<Eigen::VectorXcd>& samples,
                     const HypothesisPair& hyp) {
  Eigen::LLT<Eigen::MatrixXcd> llt0(hyp.sigma0);
  Eigen::LLT<Eigen::MatrixXcd> llt1(hyp.sigma1);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success) {
    throw std::domain_error("llr_statistic: singular hypothesis covariance");
  }
  const double logdet_term = lndet_pd(llt0) - lndet_pd(llt1);
  double acc = 0.0;
  for (const auto& r : samples) {
    const double q0 = r.dot(llt0.solve(r)).real();
    const double q1 = r.dot(llt1.solve(r)).real();
    acc += q0 - q1;
  }
  return acc + static_cast<double>(samples.size()) * logdet_term;
}

ROCCurve simulate_roc(const DesignPoint& design, const ChannelSet& ch,
                      const std::vector<double>& var_noise_rx, DetectionMode mode,
                      int n_symbols, int n_trials, Rng& rng, int local_j) {
  if (n_trials < 1 || n_symbols < 1) {
    throw std::invalid_argument("simulate_roc: counts must be >= 1");
  }
  const HypothesisPair hyp =
      hypothesis_covariances(design, ch, var_noise_rx, mode, local_j);
  Eigen::LLT<Eigen::MatrixXcd> root0(hyp.sigma0);
  Eigen::LLT<Eigen::MatrixXcd> root1(hyp.sigma1);
  if (root0.info() != Eigen::Success || root1.info() != Eigen::Success) {
    throw std::domain_error("simulate_roc: singular hypothesis covariance");
  }

  const Eigen::Index dim = hyp.sigma0.rows();
  std::vector<double> s0(n_trials), s1(n_trials);
  std::vector<Eigen::VectorXcd> batch(static_cast<std::size_t>(n_symbols));
  for (int tr = 0; tr < n_trials; ++tr) {
    for (int m = 0; m < n_symbols; ++m) {
      batch[m] = root0.matrixL() * standard_complex_gaussian(dim, rng);
    }
    s0[tr] = llr_statistic(batch, hyp);
    for (int m = 0; m < n_symbols; ++m) {
      batch[m] = root1.matrixL() * standard_complex_gaussian(dim, rng);
    }
    s1[tr] = llr_statistic(batch, hyp);
  }
  return sweep_roc(std::move(s0), std::move(s1));
}

ROCCurve simulate_roc_distributed(const DesignPoint& design, const ChannelSet& ch,
                                  const std::vector<double>& var_noise_rx,
                                  int n_symbols, int n_trials, Rng& rng) {
  if (n_trials < 1 || n_symbols < 1) {
    throw std::invalid_argument("simulate_roc_distributed: counts must be >= 1");
  }
  const int n_rx = ch.n_rx;
  std::vector<HypothesisPair> hyps;
  for (int j = 0; j < n_rx; ++j) {
    hyps.push_back(hypothesis_covariances(design, ch, var_noise_rx,
                                          DetectionMode::Local, j,
                                          /*include_rx_quantization=*/false));
  }
  // The RXs observe one shared transmit waveform, so their signals are drawn
  // jointly (cross-RX correlation included) even though each local statistic
  // only sees its own block.
  const HypothesisPair joint = hypothesis_covariances(
      design, ch, var_noise_rx, DetectionMode::Centralized, 0,
      /*include_rx_quantization=*/false);
  const Eigen::LLT<Eigen::MatrixXcd> root0(joint.sigma0), root1(joint.sigma1);
  if (root0.info() != Eigen::Success || root1.info() != Eigen::Success) {
    throw std::domain_error("simulate_roc_distributed: singular covariance");
  }

  // local statistics per trial and RX
  std::vector<std::vector<double>> s0(n_rx), s1(n_rx);
  const Eigen::Index dim = ch.n_antennas;
  const Eigen::Index joint_dim = ch.rx_dim();
  std::vector<std::vector<Eigen::VectorXcd>> batches(
      static_cast<std::size_t>(n_rx),
      std::vector<Eigen::VectorXcd>(static_cast<std::size_t>(n_symbols)));
  for (int j = 0; j < n_rx; ++j) {
    s0[j].resize(n_trials);
    s1[j].resize(n_trials);
  }
  for (int tr = 0; tr < n_trials; ++tr) {
    for (int m = 0; m < n_symbols; ++m) {
      const Eigen::VectorXcd r =
          root0.matrixL() * standard_complex_gaussian(joint_dim, rng);
      for (int j = 0; j < n_rx; ++j) batches[j][m] = r.segment(j * dim, dim);
    }
    for (int j = 0; j < n_rx; ++j) s0[j][tr] = llr_statistic(batches[j], hyps[j]);
    for (int m = 0; m < n_symbols; ++m) {
      const Eigen::VectorXcd r =
          root1.matrixL() * standard_complex_gaussian(joint_dim, rng);
      for (int j = 0; j < n_rx; ++j) batches[j][m] = r.segment(j * dim, dim);
    }
    for (int j = 0; j < n_rx; ++j) s1[j][tr] = llr_statistic(batches[j], hyps[j]);
  }

  // common local false-alarm level swept; thresholds are empirical H0 quantiles
  std::vector<std::vector<double>> s0_sorted = s0;
  for (auto& v : s0_sorted) std::sort(v.begin(), v.end(), std::greater<>());

  const int n_levels = std::min(n_trials, 512);
  ROCCurve roc;
  roc.n_trials = n_trials;
  roc.p_fa.push_back(0.0);
  roc.p_de.push_back(0.0);
  std::vector<double> thresholds(n_rx), llrs(n_rx);
  for (int lev = 0; lev <= n_levels; ++lev) {
    const int count = static_cast<int>(
        std::llround(static_cast<double>(lev) * n_trials / n_levels));
    for (int j = 0; j < n_rx; ++j) {
      thresholds[j] = count >= n_trials
                          ? -std::numeric_limits<double>::infinity()
                          : s0_sorted[j][count];
    }
    int fa = 0, de = 0;
    for (int tr = 0; tr < n_trials; ++tr) {
      for (int j = 0; j < n_rx; ++j) llrs[j] = s0[j][tr];
      fa += distributed_decision(llrs, thresholds);
      for (int j = 0; j < n_rx; ++j) llrs[j] = s1[j][tr];
      de += distributed_decision(llrs, thresholds);
    }
    roc.p_fa.push_back(static_cast<double>(fa) / n_trials);
    roc.p_de.push_back(static_cast<double>(de) / n_trials);
  }
  roc.p_fa.push_back(1.0);
  roc.p_de.push_back(1.0);

  // enforce monotone presentation (majority fusion is not a single-threshold
  // sweep, so raw points may jitter)
  for (std::size_t i = 1; i < roc.p_de.size(); ++i) {
    roc.p_fa[i] = std::max(roc.p_fa[i], roc.p_fa[i - 1]);
    roc.p_de[i] = std::max(roc.p_de[i], roc.p_de[i - 1]);
  }
  return roc;
}

double detection_at_fa(const ROCCurve& roc, double target_fa) {
  if (roc.p_fa.empty()) {
    throw std::invalid_argument("detection_at_fa: empty curve");
  }
  if (target_fa <= 0.0 || target_fa >= 1.0) {
    throw std::invalid_argument("detection_at_fa: target must be in (0,1)");
  }
  // collapse duplicate p_fa onto the best achievable p_de
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < roc.p_fa.size(); ++i) {
    if (!xs.empty() && roc.p_fa[i] == xs.back()) {
      ys.back() = std::max(ys.back(), roc.p_de[i]);
    } else {
      xs.push_back(roc.p_fa[i]);
      ys.push_back(roc.p_de[i]);
    }
  }
  const auto it = std::lower_bound(xs.begin(), xs.end(), target_fa);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (target_fa - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

double sensing_accuracy(double p_de, double p_fa) {
  if (p_de < 0.0 || p_de > 1.0 || p_fa < 0.0 || p_fa > 1.0) {
    throw std::invalid_argument("sensing_accuracy: probabilities must be in [0,1]");
  }
  return (p_de + p_fa) / 2.0;
}

bool distributed_decision(const std::vector<double>& local_llrs,
                          const std::vector<double>& thresholds) {
  if (local_llrs.size() != thresholds.size()) {
    throw std::invalid_argument("distributed_decision: length mismatch");
  }
  int votes = 0;
  for (std::size_t j = 0; j < local_llrs.size(); ++j) {
    votes += local_llrs[j] > thresholds[j];
  }
  const int needed = (static_cast<int>(local_llrs.size()) + 1) / 2;
  return votes >= needed;
}

}  // namespace isac
