#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isac/model.hpp"

namespace isac {

/// Gaussian covariances of the compressed CU observation under target-absent
/// (sigma0) and target-present (sigma1) hypotheses.
struct HypothesisPair {
  Eigen::MatrixXcd sigma0;
  Eigen::MatrixXcd sigma1;
};

struct ROCCurve {
  std::vector<double> p_fa;  // sorted ascending
  std::vector<double> p_de;  // non-decreasing along p_fa
  int n_trials = 0;
};

enum class DetectionMode { Centralized, Local };

/// Second-moment covariances of the stacked (centralized) or per-RX (local)
/// observation. `include_rx_quantization` is dropped by the distributed
/// baseline, where decisions rather than samples travel the fronthaul.
HypothesisPair hypothesis_covariances(const DesignPoint& design, const ChannelSet& ch,
                                      const std::vector<double>& var_noise_rx,
                                      DetectionMode mode, int local_j = 0,
                                      bool include_rx_quantization = true);

/// Exact log-likelihood ratio for zero-mean complex Gaussian samples:
/// sum_m r^H (S0^-1 - S1^-1) r + M (ln det S0 - ln det S1).
double llr_statistic(const std::vector<Eigen::VectorXcd>& samples,
                     const HypothesisPair& hyp);

/// Monte Carlo ROC of the centralized LLR detector: n_trials per hypothesis,
/// n_symbols i.i.d. observation vectors per trial, full threshold sweep.
ROCCurve simulate_roc(const DesignPoint& design, const ChannelSet& ch,
                      const std::vector<double>& var_noise_rx, DetectionMode mode,
                      int n_symbols, int n_trials, Rng& rng, int local_j = 0);

/// Fused ROC of the distributed majority-rule baseline: per-RX local LLR
/// detectors at a common local false-alarm level swept over its range,
/// thresholds set empirically from the H0 trials; no RX compression.
ROCCurve simulate_roc_distributed(const DesignPoint& design, const ChannelSet& ch,
                                  const std::vector<double>& var_noise_rx,
                                  int n_symbols, int n_trials, Rng& rng);

/// Linear interpolation of p_de at the requested false-alarm probability.
double detection_at_fa(const ROCCurve& roc, double target_fa);

/// Sensing accuracy score (p_de + p_fa) / 2.
double sensing_accuracy(double p_de, double p_fa);

/// Majority vote: true iff #(llr_j > threshold_j) >= ceil(N_R / 2).
bool distributed_decision(const std::vector<double>& local_llrs,
                          const std::vector<double>& thresholds);

}  // namespace isac
