#pragma once

#include <string>
#include <vector>

#include "isac/subproblem.hpp"

namespace isac {

/// Raised when no strictly feasible starting point exists for the given
/// channels and budgets; names the binding constraint.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

struct MMIterRecord {
  double objective = 0.0;    // tr(G (Gamma + Omega^TX) G^H) at the iterate
  double theta_diff = 0.0;   // ||Theta_n - Theta_{n-1}||
  std::string solver_status; // "ok" or error text
  double wall_seconds = 0.0;
};

struct RankReport {
  double eig_ratio = 0.0;  // lambda2 / lambda1 of the recovered covariance
  double zeta = 1.0;       // applied beamformer scaling factor
};

struct MMTrace {
  std::vector<MMIterRecord> iterations;
  std::vector<RankReport> rank_reports;  // one per user
  bool converged = false;
  bool randomized_recovery = false;      // rank-1 recovery needed resampling
};

/// Builds a strictly feasible transformed starting point: beams matched to the
/// user channels and projected orthogonal to the Eve channel, power and
/// quantization levels set by bisection against the budgets. Throws
/// InfeasibleError naming the binding constraint when no point is found.
TransformedPoint initialize_feasible(const ChannelSet& ch, const Budgets& budgets,
                                     const NoiseLevels& noise, Rng& rng);

/// Dominant-eigenpair beamformer extraction; returns sqrt(lambda1) * u1 and
/// reports the lambda2/lambda1 ratio. Zero input yields the zero vector.
Eigen::VectorXcd extract_rank_one(const Eigen::MatrixXcd& v, double* eig_ratio);

/// Full optimization: iterates the convex surrogate subproblem from the
/// feasible start until the iterate difference falls below settings.epsilon,
/// then recovers a rank-1 beamforming design.
std::pair<DesignPoint, MMTrace> mm_optimize(const ChannelSet& ch,
                                            const Budgets& budgets,
                                            const NoiseLevels& noise,
                                            const MMSettings& settings, Rng& rng);

}  // namespace isac
