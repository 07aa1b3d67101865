#pragma once

#include <string>

#include "isac/transform.hpp"

namespace isac {

/// Knobs for the MM loop and the inner convex solver.
struct MMSettings {
  double epsilon = 1e-4;     // convergence threshold on ||Theta_n - Theta_{n-1}||
  int max_iters = 100;       // MM iteration cap
  double solver_tol = 1e-7;  // subproblem duality-gap tolerance
  double rank_tol = 1e-3;    // lambda2/lambda1 ratio treated as rank-1

  void validate() const;
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Solves the per-iteration convex surrogate problem: maximize the linear
/// sensing objective subject to the surrogate secrecy/fronthaul constraints,
/// power, PSD cones and the normalization equality. Feasible-start barrier
/// method; the anchor must be strictly feasible for its own surrogate problem.
TransformedPoint solve_subproblem(const TransformedPoint& anchor, const ChannelSet& ch,
                                  const Budgets& budgets, const NoiseLevels& noise,
                                  const MMSettings& settings);

}  // namespace isac
