#include "isac/mm.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace isac {

namespace {

constexpr double kMargin = 0.9;     // feasibility headroom at initialization
constexpr double kQtxFloor = 1e-6;  // smallest quantization variance considered

/// Smallest q in [floor, 1e9] with rate(q) <= target (rate decreasing in q).
double bisect_quantizer(const std::function<double(double)>& rate, double target) {
  if (rate(kQtxFloor) <= target) return kQtxFloor;
  double lo = kQtxFloor, hi = 1e9;
  if (rate(hi) > target) {
    throw InfeasibleError("initialize_feasible: fronthaul rate does not fall below "
                          "capacity at any quantization level");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = std::sqrt(lo * hi);  // log-space bisection
    (rate(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

/// Matched beams with column k projected orthogonal to the span of `nulled`
/// columns (empty selection = plain maximum-ratio directions). Returns an
/// empty matrix when any projected direction degenerates.
Eigen::MatrixXcd projected_directions(const ChannelSet& ch, bool null_eve,
                                      bool null_other_users) {
  const int td = ch.tx_dim();
  Eigen::MatrixXcd dirs(td, ch.n_users);
  for (int k = 0; k < ch.n_users; ++k) {
    std::vector<Eigen::VectorXcd> nulled;
    if (null_eve && ch.h_eve.norm() > 0.0) nulled.push_back(ch.h_eve);
    if (null_other_users) {
      for (int kk = 0; kk < ch.n_users; ++kk) {
        if (kk != k) nulled.push_back(ch.h_users.col(kk));
      }
    }
    Eigen::VectorXcd d = ch.h_users.col(k);
    if (!nulled.empty()) {
      Eigen::MatrixXcd b(td, static_cast<Eigen::Index>(nulled.size()));
      for (std::size_t c = 0; c < nulled.size(); ++c) b.col(c) = nulled[c];
      Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(b);
      qr.setThreshold(1e-10);
      const Eigen::Index rank = qr.rank();
      if (rank >= td) return {};  // no orthogonal complement left
      const Eigen::MatrixXcd q =
          Eigen::MatrixXcd(qr.householderQ()).leftCols(rank);
      d -= q * (q.adjoint() * d);
    }
    const double n = d.norm();
    if (n < 1e-9 * (1.0 + ch.h_users.col(k).norm())) return {};
    dirs.col(k) = d / n;
  }
  return dirs;
}

struct ScaledDesign {
  DesignPoint design;
  bool power_ok = false;
};

/// Builds a design at beam scale c: TX quantizers bisected to the fronthaul
/// caps, power feasibility evaluated against the margin.
ScaledDesign design_at_scale(double c, const Eigen::MatrixXcd& dirs,
                             const ChannelSet& ch, const Budgets& budgets,
                             const NoiseLevels& noise) {
  ScaledDesign sd;
  sd.design.beam = c * dirs;
  sd.design.q_tx.resize(ch.n_tx);
  sd.design.q_rx = Eigen::VectorXd::Ones(ch.n_rx);  // placeholder until RX pass
  for (int i = 0; i < ch.n_tx; ++i) {
    auto rate = [&](double q) {
      DesignPoint d = sd.design;
      d.q_tx(i) = q;
      return fronthaul_rate_tx(d, ch, i);
    };
    sd.design.q_tx(i) = bisect_quantizer(rate, kMargin * budgets.cap_tx);
  }
  sd.power_ok = true;
  for (int i = 0; i < ch.n_tx; ++i) {
    if (transmit_power(sd.design, ch, i) > kMargin * budgets.power) {
      sd.power_ok = false;
    }
  }
  for (int j = 0; j < ch.n_rx; ++j) {
    auto rate = [&](double q) {
      DesignPoint d = sd.design;
      d.q_rx(j) = q;
      return fronthaul_rate_rx(d, ch, j, noise.rx);
    };
    sd.design.q_rx(j) = bisect_quantizer(rate, kMargin * budgets.cap_rx);
  }
  return sd;
}

}  // namespace

namespace {

/// Builds the transformed point for a quantized design at one beam scale.
TransformedPoint lift_design(const DesignPoint& design, double scale,
                             const ChannelSet& ch, const NoiseLevels& noise) {
  // SDR covariances with a small ridge keeping the PSD cone interior
  const double ridge = 1e-8 * (1.0 + scale * scale) / ch.tx_dim();
  std::vector<Eigen::MatrixXcd> v;
  v.reserve(ch.n_users);
  for (int k = 0; k < ch.n_users; ++k) {
    Eigen::MatrixXcd vk = design.beam.col(k) * design.beam.col(k).adjoint();
    vk.diagonal().array() += ridge;
    v.push_back(std::move(vk));
  }
  return to_transformed(v, design.q_tx, design.q_rx, ch, noise.rx);
}

/// Runs the staged scale search for one direction set. Returns the first
/// secrecy-feasible transformed point, scanning downward from the largest
/// power-feasible scale; tracks the best secrecy slack seen for diagnostics.
std::optional<TransformedPoint> try_directions(const Eigen::MatrixXcd& dirs,
                                               const ChannelSet& ch,
                                               const Budgets& budgets,
                                               const NoiseLevels& noise,
                                               bool* power_feasible,
                                               double* best_secrecy) {
  // largest beam scale whose quantized design stays inside the power margin
  double lo = 0.0;
  double hi = std::sqrt(kMargin * budgets.power * ch.n_tx);
  while (design_at_scale(hi, dirs, ch, budgets, noise).power_ok && hi < 1e8) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (design_at_scale(mid, dirs, ch, budgets, noise).power_ok ? lo : hi) = mid;
  }
  if (lo <= 0.0) return std::nullopt;
  *power_feasible = true;

  for (int shift = 0; shift <= 8; ++shift) {
    const double scale = lo * std::pow(2.0, -shift);
    const DesignPoint design =
        design_at_scale(scale, dirs, ch, budgets, noise).design;
    TransformedPoint theta = lift_design(design, scale, ch, noise);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ch.n_users; ++k) {
      worst = std::min(worst, transformed_secrecy_rate(theta, ch, noise, k));
    }
    *best_secrecy = std::max(*best_secrecy, worst);
    if (worst >= budgets.secrecy_floor + 1e-9) return theta;
  }
  return std::nullopt;
}

}  // namespace

TransformedPoint initialize_feasible(const ChannelSet& ch, const Budgets& budgets,
                                     const NoiseLevels& noise, Rng& rng) {
  (void)rng;  // the staged procedure is deterministic; rng reserved for variants

  // Candidate direction sets, from most to least interference suppression:
  // zero-forcing across Eve and the other users, Eve-nulling only, and plain
  // maximum-ratio beams (the only option when the channel has one dimension).
  const std::array<std::pair<bool, bool>, 3> modes = {
      {{true, true}, {true, false}, {false, false}}};

  bool power_feasible = false;
  double best_secrecy = -std::numeric_limits<double>::infinity();
  for (const auto& [null_eve, null_users] : modes) {
    const Eigen::MatrixXcd dirs = projected_directions(ch, null_eve, null_users);
    if (dirs.size() == 0) continue;
    if (auto theta = try_directions(dirs, ch, budgets, noise, &power_feasible,
                                    &best_secrecy)) {
      return *theta;
    }
  }
  if (!power_feasible) {
    throw InfeasibleError("initialize_feasible: power budget admits no design");
  }
  throw InfeasibleError(
      "initialize_feasible: secrecy floor unattainable (best achieved " +
      std::to_string(best_secrecy) + " of " +
      std::to_string(budgets.secrecy_floor) + " bits)");
}

Eigen::VectorXcd extract_rank_one(const Eigen::MatrixXcd& v, double* eig_ratio) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("extract_rank_one: eigendecomposition failed");
  }
  const Eigen::Index n = v.rows();
  const double l1 = std::max(es.eigenvalues()(n - 1), 0.0);
  const double l2 = n >= 2 ? std::max(es.eigenvalues()(n - 2), 0.0) : 0.0;
  if (eig_ratio) *eig_ratio = l1 > 0.0 ? l2 / l1 : 0.0;
  if (l1 <= 0.0) return Eigen::VectorXcd::Zero(n);
  return std::sqrt(l1) * es.eigenvectors().col(n - 1);
}

namespace {

/// Applies the scaling-factor rule: shrink the common beam scale until the
/// hard constraints hold, then validate secrecy.
bool try_recover(DesignPoint& design, const ChannelSet& ch, const Budgets& budgets,
                 const NoiseLevels& noise, double tol, double* zeta_out) {
  const Eigen::MatrixXcd beam0 = design.beam;
  double zeta = 1.0;

  auto hard_ok = [&](double s) {
    DesignPoint d = design;
    d.beam = s * beam0;
    for (int i = 0; i < ch.n_tx; ++i) {
      if (transmit_power(d, ch, i) > budgets.power * (1.0 + tol)) return false;
      if (fronthaul_rate_tx(d, ch, i) > budgets.cap_tx * (1.0 + tol)) return false;
    }
    for (int j = 0; j < ch.n_rx; ++j) {
      if (fronthaul_rate_rx(d, ch, j, noise.rx) > budgets.cap_rx * (1.0 + tol)) {
        return false;
      }
    }
    return true;
  };

  if (!hard_ok(1.0)) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (hard_ok(mid) ? lo : hi) = mid;
    }
    zeta = lo;
    design.beam = zeta * beam0;
  }
  if (zeta_out) *zeta_out = zeta;
  return check_feasibility(design, ch, budgets, noise, tol).all_pass;
}

/// next + beta * (next - anchor); affine, so the normalization equality
/// (which both endpoints satisfy) is preserved exactly.
TransformedPoint extrapolate(const TransformedPoint& next,
                             const TransformedPoint& anchor, double beta) {
  TransformedPoint out = next;
  for (std::size_t k = 0; k < out.gamma.size(); ++k) {
    out.gamma[k] += beta * (next.gamma[k] - anchor.gamma[k]);
  }
  out.omega_tx += beta * (next.omega_tx - anchor.omega_tx);
  out.omega_rx += beta * (next.omega_rx - anchor.omega_rx);
  out.z += beta * (next.z - anchor.z);
  return out;
}

/// Clamps the gamma blocks and omega scalars back to the cone interior and
/// rescales the whole point to restore the normalization equality. A common
/// positive rescale of (gamma, omega, z) maps to the same original-variable
/// design under the fractional transform, so only the clamping perturbs the
/// candidate.
std::optional<TransformedPoint> repair_candidate(TransformedPoint cand,
                                                 const ChannelSet& ch,
                                                 const NoiseLevels& noise) {
  if (!(cand.z > 0.0)) return std::nullopt;
  for (auto& g : cand.gamma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    if (es.info() != Eigen::Success) return std::nullopt;
    const double floor = 1e-12 * (1.0 + std::abs(g.real().trace()));
    if (es.eigenvalues().minCoeff() >= floor) continue;
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor);
    g = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    g = Eigen::MatrixXcd(0.5 * (g + g.adjoint()));
  }
  const double omega_floor = 1e-14 * cand.z;
  cand.omega_tx = cand.omega_tx.cwiseMax(omega_floor);
  cand.omega_rx = cand.omega_rx.cwiseMax(omega_floor);
  const double scale = normalization_residual(cand, ch, noise.rx) + 1.0;
  if (!(scale > 0.0)) return std::nullopt;
  for (auto& g : cand.gamma) g /= scale;
  cand.omega_tx /= scale;
  cand.omega_rx /= scale;
  cand.z /= scale;
  return cand;
}

/// Strict feasibility of the exact transformed constraints with margins. A
/// strictly feasible point is a valid MM anchor: every surrogate is tight at
/// its own anchor, so the point is feasible for the next subproblem.
bool strictly_feasible(const TransformedPoint& theta, const ChannelSet& ch,
                       const Budgets& budgets, const NoiseLevels& noise) {
  if (!(theta.z > 1e-12)) return false;
  if (theta.omega_tx.size() > 0 && !(theta.omega_tx.minCoeff() > 0.0)) return false;
  if (theta.omega_rx.size() > 0 && !(theta.omega_rx.minCoeff() > 0.0)) return false;
  for (const auto& g : theta.gamma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return false;
    if (!(es.eigenvalues().minCoeff() > 1e-14 * (1.0 + std::abs(g.real().trace())))) {
      return false;
    }
  }
  try {
    for (int k = 0; k < ch.n_users; ++k) {
      if (transformed_secrecy_rate(theta, ch, noise, k) <
          budgets.secrecy_floor + 1e-9) {
        return false;
      }
    }
    for (int i = 0; i < ch.n_tx; ++i) {
      const double power = tx_block_of(theta, ch.n_antennas, i).real().trace();
      if (power > theta.z * budgets.power * (1.0 - 1e-9)) return false;
      if (transformed_fronthaul_tx(theta, ch, i) > budgets.cap_tx - 1e-9) {
        return false;
      }
    }
    for (int j = 0; j < ch.n_rx; ++j) {
      if (transformed_fronthaul_rx(theta, ch, noise.rx, j) >
          budgets.cap_rx - 1e-9) {
        return false;
      }
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

std::pair<DesignPoint, MMTrace> mm_optimize(const ChannelSet& ch,
                                            const Budgets& budgets,
                                            const NoiseLevels& noise,
                                            const MMSettings& settings, Rng& rng) {
  settings.validate();
  MMTrace trace;

  TransformedPoint theta = initialize_feasible(ch, budgets, noise, rng);
  double obj = transformed_objective(theta, ch);

  const bool zero_objective = ch.g_sense.norm() == 0.0;
  if (!zero_objective) {
    double prev_diff = -1.0;
    for (int n = 0; n < settings.max_iters; ++n) {
      const auto t0 = std::chrono::steady_clock::now();
      TransformedPoint next = solve_subproblem(theta, ch, budgets, noise, settings);

      double obj_next = transformed_objective(next, ch);
      double diff = next.distance(theta);

      // Safeguarded extrapolation: when the step lengths contract
      // geometrically, jump along the step direction by the geometric-series
      // tail. Accept only if the point is strictly feasible for the exact
      // constraints and does not lower the objective, so the MM guarantees
      // are untouched.
      if (prev_diff > 0.0 && diff > settings.epsilon && diff < 0.95 * prev_diff) {
        const double r = diff / prev_diff;
        // Backtrack: a full tail jump usually exits along the active
        // constraints, but curvature violations shrink quadratically in beta.
        for (double beta = std::min(r / (1.0 - r), 10.0); beta >= 0.4;
             beta *= 0.5) {
          auto cand =
              repair_candidate(extrapolate(next, theta, beta), ch, noise);
          if (!cand || !strictly_feasible(*cand, ch, budgets, noise)) continue;
          const double obj_cand = transformed_objective(*cand, ch);
          if (obj_cand >= obj_next) {
            next = std::move(*cand);
            obj_next = obj_cand;
            diff = next.distance(theta);
            break;
          }
        }
      }
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();

      const double slack = settings.solver_tol * (1.0 + std::abs(obj));
      if (obj_next < obj - slack) {
        throw SolverError("mm_optimize: objective decreased by " +
                          std::to_string(obj - obj_next) + " (non-monotone step)");
      }
      prev_diff = diff;
      trace.iterations.push_back({obj_next, diff, "ok", wall});
      theta = std::move(next);
      obj = obj_next;
      if (diff <= settings.epsilon) {
        trace.converged = true;
        break;
      }
    }
  } else {
    trace.iterations.push_back({0.0, 0.0, "zero sensing channel", 0.0});
    trace.converged = true;
  }

  // rank-1 recovery
  const SdrPoint sdr = from_transformed(theta);
  DesignPoint design;
  design.beam.resize(ch.tx_dim(), ch.n_users);
  design.q_tx = sdr.q_tx;
  design.q_rx = sdr.q_rx;
  trace.rank_reports.resize(ch.n_users);
  for (int k = 0; k < ch.n_users; ++k) {
    design.beam.col(k) = extract_rank_one(sdr.v[k], &trace.rank_reports[k].eig_ratio);
  }

  const double recovery_tol = 1e-4;
  double zeta = 1.0;
  if (try_recover(design, ch, budgets, noise, recovery_tol, &zeta)) {
    for (auto& r : trace.rank_reports) r.zeta = zeta;
    return {design, trace};
  }

  // Gaussian randomization around the SDR covariances
  trace.randomized_recovery = true;
  DesignPoint best = design;
  double best_secrecy = secrecy_rate(design, ch, noise);
  std::vector<Eigen::LLT<Eigen::MatrixXcd>> roots;
  for (int k = 0; k < ch.n_users; ++k) {
    Eigen::MatrixXcd vk = sdr.v[k];
    vk.diagonal().array() += 1e-12 * (1.0 + vk.real().trace());
    roots.emplace_back(vk);
  }
  for (int s = 0; s < 100; ++s) {
    DesignPoint cand;
    cand.q_tx = sdr.q_tx;
    cand.q_rx = sdr.q_rx;
    cand.beam.resize(ch.tx_dim(), ch.n_users);
    for (int k = 0; k < ch.n_users; ++k) {
      Eigen::VectorXcd xi(ch.tx_dim());
      for (Eigen::Index r = 0; r < xi.size(); ++r) xi(r) = complex_gaussian(rng);
      Eigen::VectorXcd w = roots[k].matrixL() * xi;
      const double target = std::sqrt(std::max(sdr.v[k].real().trace(), 0.0));
      if (w.norm() > 0.0) w *= target / w.norm();
      cand.beam.col(k) = w;
    }
    double cand_zeta = 1.0;
    if (try_recover(cand, ch, budgets, noise, recovery_tol, &cand_zeta)) {
      for (auto& r : trace.rank_reports) r.zeta = cand_zeta;
      return {cand, trace};
    }
    const double sr = secrecy_rate(cand, ch, noise);
    if (sr > best_secrecy) {
      best_secrecy = sr;
      best = cand;
    }
  }
  throw SolverError(
      "mm_optimize: rank-1 recovery failed feasibility after randomization; "
      "best secrecy " +
      std::to_string(best_secrecy) + " vs floor " +
      std::to_string(budgets.secrecy_floor));
}

}  // namespace isac
