#include "isac/subproblem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace isac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void pack_hermitian(const Eigen::MatrixXcd& m, double* out) {
  const int n = static_cast<int>(m.rows());
  int p = 0;
  for (int d = 0; d < n; ++d) out[p++] = m(d, d).real();
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      out[p++] = m(r, c).real();
      out[p++] = m(r, c).imag();
    }
  }
}

Eigen::MatrixXcd unpack_hermitian(const double* x, int n) {
  Eigen::MatrixXcd m(n, n);
  int p = 0;
  for (int d = 0; d < n; ++d) m(d, d) = x[p++];
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      const double re = x[p++];
      const double im = x[p++];
      m(r, c) = {re, im};
      m(c, r) = {re, -im};
    }
  }
  return m;
}

/// Coefficients of the real linear functional M -> Re tr(A M) over the
/// Hermitian parametrization of M (A Hermitian).
Eigen::VectorXd herm_coeffs(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd coef(n * n);
  int p = 0;
  for (int d = 0; d < n; ++d) coef(p++) = a(d, d).real();
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      coef(p++) = 2.0 * a(r, c).real();
      coef(p++) = 2.0 * a(r, c).imag();
    }
  }
  return coef;
}

struct LogTerm {
  Eigen::VectorXd a;  // affine argument a.x (no constant offset needed here)
  double alpha = 1.0;
};

/// c(x) = c0 + w.x - sum_t alpha_t * log2(a_t.x); feasible iff c(x) < 0.
struct SmoothConstraint {
  std::string name;
  double c0 = 0.0;
  Eigen::VectorXd w;
  std::vector<LogTerm> logs;
};

struct ProblemData {
  int dim = 0;
  int n = 0;        // gamma size
  int n_users = 0;  // number of gamma blocks
  int params_per_gamma = 0;
  int off_omega_tx = 0, off_omega_rx = 0, off_z = 0;
  int n_tx = 0, n_rx = 0, n_antennas = 0;

  Eigen::VectorXd obj;       // maximize obj.x
  Eigen::VectorXd norm_row;  // equality norm_row.x = 1
  std::vector<SmoothConstraint> cons;
  double barrier_degree = 0.0;
};

double block_trace(const Eigen::MatrixXcd& a, int i, int na) {
  const Eigen::Index off = static_cast<Eigen::Index>(i) * na;
  return a.block(off, off, na, na).real().trace();
}

/// Spread gamma-parameter coefficients of Hermitian A into every gamma slot.
void add_gamma_coeffs(Eigen::VectorXd& row, const ProblemData& pd,
                      const Eigen::MatrixXcd& a) {
  const Eigen::VectorXd coef = herm_coeffs(a);
  for (int k = 0; k < pd.n_users; ++k) {
    row.segment(k * pd.params_per_gamma, pd.params_per_gamma) += coef;
  }
}

/// Affine coefficients of h^H (sum Gamma + Omega^TX) h + z*var over x,
/// optionally excluding one gamma block.
Eigen::VectorXd quad_row(const ProblemData& pd, const Eigen::VectorXcd& h,
                         double var, int excluded_k) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(pd.dim);
  const Eigen::MatrixXcd hh = h * h.adjoint();
  const Eigen::VectorXd coef = herm_coeffs(hh);
  for (int k = 0; k < pd.n_users; ++k) {
    if (k == excluded_k) continue;
    row.segment(k * pd.params_per_gamma, pd.params_per_gamma) += coef;
  }
  for (int i = 0; i < pd.n_tx; ++i) {
    row(pd.off_omega_tx + i) +=
        h.segment(static_cast<Eigen::Index>(i) * pd.n_antennas, pd.n_antennas)
            .squaredNorm();
  }
  row(pd.off_z) += var;
  return row;
}

ProblemData build_problem(const TransformedPoint& anchor, const ChannelSet& ch,
                          const Budgets& budgets, const NoiseLevels& noise) {
  ProblemData pd;
  pd.n = ch.tx_dim();
  pd.n_users = ch.n_users;
  pd.n_tx = ch.n_tx;
  pd.n_rx = ch.n_rx;
  pd.n_antennas = ch.n_antennas;
  pd.params_per_gamma = pd.n * pd.n;
  pd.off_omega_tx = pd.n_users * pd.params_per_gamma;
  pd.off_omega_rx = pd.off_omega_tx + pd.n_tx;
  pd.off_z = pd.off_omega_rx + pd.n_rx;
  pd.dim = pd.off_z + 1;

  const int na = ch.n_antennas;

  // objective: tr(G (sum Gamma + Omega^TX) G^H)
  pd.obj = Eigen::VectorXd::Zero(pd.dim);
  const Eigen::MatrixXcd gtg = ch.g_sense.adjoint() * ch.g_sense;
  add_gamma_coeffs(pd.obj, pd, gtg);
  for (int i = 0; i < pd.n_tx; ++i) {
    pd.obj(pd.off_omega_tx + i) = block_trace(gtg, i, na);
  }

  // normalization equality row
  pd.norm_row = Eigen::VectorXd::Zero(pd.dim);
  const Eigen::MatrixXcd ctc = ch.c_clutter.adjoint() * ch.c_clutter;
  add_gamma_coeffs(pd.norm_row, pd, ctc);
  double z_coeff = 0.0;
  for (int j = 0; j < pd.n_rx; ++j) {
    pd.norm_row(pd.off_omega_rx + j) = na;
    z_coeff += na * noise.rx[j];
  }
  for (int i = 0; i < pd.n_tx; ++i) {
    pd.norm_row(pd.off_omega_tx + i) += block_trace(ctc, i, na);
  }
  pd.norm_row(pd.off_z) = z_coeff;

  // secrecy surrogate constraints (lower bounds, flipped to c <= 0 form)
  for (int k = 0; k < pd.n_users; ++k) {
    const Eigen::VectorXcd hk = ch.h_users.col(k);
    const Eigen::VectorXd b_row = quad_row(pd, hk, noise.user, k);
    const Eigen::VectorXd e_all_row = quad_row(pd, ch.h_eve, noise.eve, -1);

    double b_anchor = 0.0, e_anchor = 0.0;
    {
      // evaluate the anchor values of the linearized denominators
      Eigen::VectorXd xa(pd.dim);
      for (int kk = 0; kk < pd.n_users; ++kk) {
        pack_hermitian(anchor.gamma[kk], xa.data() + kk * pd.params_per_gamma);
      }
      xa.segment(pd.off_omega_tx, pd.n_tx) = anchor.omega_tx;
      xa.segment(pd.off_omega_rx, pd.n_rx) = anchor.omega_rx;
      xa(pd.off_z) = anchor.z;
      b_anchor = b_row.dot(xa);
      e_anchor = e_all_row.dot(xa);
    }
    if (b_anchor <= 0.0 || e_anchor <= 0.0) {
      throw SolverError("solve_subproblem: anchor secrecy denominators nonpositive");
    }

    SmoothConstraint c;
    c.name = "secrecy[" + std::to_string(k) + "]";
    c.c0 = budgets.secrecy_floor + std::log2(b_anchor) + std::log2(e_anchor) -
           2.0 / kLn2;
    c.w = b_row / (b_anchor * kLn2) + e_all_row / (e_anchor * kLn2);
    c.logs.push_back({quad_row(pd, hk, noise.user, -1), 1.0});        // A_k
    c.logs.push_back({quad_row(pd, ch.h_eve, noise.eve, k), 1.0});    // E_k
    pd.cons.push_back(std::move(c));
  }

  // TX fronthaul surrogates
  for (int i = 0; i < pd.n_tx; ++i) {
    const Eigen::MatrixXcd x1 = tx_block_of(anchor, na, i);
    Eigen::LLT<Eigen::MatrixXcd> llt(x1);
    if (llt.info() != Eigen::Success) {
      throw SolverError("solve_subproblem: singular TX anchor block");
    }
    const Eigen::MatrixXcd x1inv =
        llt.solve(Eigen::MatrixXcd::Identity(na, na));
    double logdet = 0.0;
    for (int d = 0; d < na; ++d) logdet += std::log(llt.matrixLLT()(d, d).real());
    logdet = 2.0 * logdet / kLn2;

    SmoothConstraint c;
    c.name = "fronthaul_tx[" + std::to_string(i) + "]";
    c.c0 = logdet - na / kLn2 - budgets.cap_tx;
    c.w = Eigen::VectorXd::Zero(pd.dim);
    Eigen::MatrixXcd a_full = Eigen::MatrixXcd::Zero(pd.n, pd.n);
    a_full.block(static_cast<Eigen::Index>(i) * na,
                 static_cast<Eigen::Index>(i) * na, na, na) = x1inv / kLn2;
    add_gamma_coeffs(c.w, pd, a_full);
    c.w(pd.off_omega_tx + i) += x1inv.real().trace() / kLn2;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(pd.dim);
    e(pd.off_omega_tx + i) = 1.0;
    c.logs.push_back({std::move(e), static_cast<double>(na)});
    pd.cons.push_back(std::move(c));
  }

  // RX fronthaul surrogates
  for (int j = 0; j < pd.n_rx; ++j) {
    const Eigen::MatrixXcd x1 = rx_cov_of(anchor, ch, noise.rx, j);
    Eigen::LLT<Eigen::MatrixXcd> llt(x1);
    if (llt.info() != Eigen::Success) {
      throw SolverError("solve_subproblem: singular RX anchor covariance");
    }
    const Eigen::MatrixXcd x1inv =
        llt.solve(Eigen::MatrixXcd::Identity(na, na));
    double logdet = 0.0;
    for (int d = 0; d < na; ++d) logdet += std::log(llt.matrixLLT()(d, d).real());
    logdet = 2.0 * logdet / kLn2;

    const Eigen::MatrixXcd f = ch.g_block_row(j) + ch.c_block_row(j);
    const Eigen::MatrixXcd a_gamma = (f.adjoint() * x1inv * f) / kLn2;

    SmoothConstraint c;
    c.name = "fronthaul_rx[" + std::to_string(j) + "]";
    c.c0 = logdet - na / kLn2 - budgets.cap_rx;
    c.w = Eigen::VectorXd::Zero(pd.dim);
    add_gamma_coeffs(c.w, pd, a_gamma);
    for (int i = 0; i < pd.n_tx; ++i) {
      c.w(pd.off_omega_tx + i) += block_trace(a_gamma, i, na);
    }
    const double tr_x1inv = x1inv.real().trace();
    c.w(pd.off_z) += noise.rx[j] * tr_x1inv / kLn2;
    c.w(pd.off_omega_rx + j) += tr_x1inv / kLn2;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(pd.dim);
    e(pd.off_omega_rx + j) = 1.0;
    c.logs.push_back({std::move(e), static_cast<double>(na)});
    pd.cons.push_back(std::move(c));
  }

  // power constraints (linear)
  for (int i = 0; i < pd.n_tx; ++i) {
    SmoothConstraint c;
    c.name = "power[" + std::to_string(i) + "]";
    c.w = Eigen::VectorXd::Zero(pd.dim);
    Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(pd.n, pd.n);
    for (int a = 0; a < na; ++a) {
      sel(static_cast<Eigen::Index>(i) * na + a,
          static_cast<Eigen::Index>(i) * na + a) = 1.0;
    }
    add_gamma_coeffs(c.w, pd, sel);
    c.w(pd.off_omega_tx + i) += na;
    c.w(pd.off_z) -= budgets.power;
    pd.cons.push_back(std::move(c));
  }

  double degree = 0.0;
  for (const auto& c : pd.cons) degree += 1.0;
  degree += static_cast<double>(pd.n_users) * pd.n;     // gamma logdet barriers
  degree += pd.n_tx + pd.n_rx + 1;                      // scalar positivity
  pd.barrier_degree = degree;
  return pd;
}

struct BarrierEval {
  double value = std::numeric_limits<double>::infinity();
  bool feasible = false;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// Evaluates the barrier-augmented objective; gradients/Hessians only when
/// `with_derivs` is set. Infeasible points report value = +inf.
BarrierEval eval_barrier(const ProblemData& pd, const Eigen::VectorXd& x, double t,
                         bool with_derivs) {
  BarrierEval ev;
  double psi = -t * pd.obj.dot(x);
  if (with_derivs) {
    ev.grad = -t * pd.obj;
    ev.hess = Eigen::MatrixXd::Zero(pd.dim, pd.dim);
  }

  // scalar positivity barriers
  for (int s = pd.off_omega_tx; s < pd.dim; ++s) {
    if (x(s) <= 0.0) return ev;
    psi -= std::log(x(s));
    if (with_derivs) {
      ev.grad(s) -= 1.0 / x(s);
      ev.hess(s, s) += 1.0 / (x(s) * x(s));
    }
  }

  // smooth inequality constraints
  for (const auto& c : pd.cons) {
    double cval = c.c0 + c.w.dot(x);
    Eigen::VectorXd cgrad;
    if (with_derivs) cgrad = c.w;
    for (const auto& lt : c.logs) {
      const double arg = lt.a.dot(x);
      if (arg <= 0.0) return ev;
      cval -= lt.alpha * std::log2(arg);
      if (with_derivs) {
        cgrad -= (lt.alpha / (arg * kLn2)) * lt.a;
      }
    }
    const double slack = -cval;
    if (slack <= 0.0) return ev;
    psi -= std::log(slack);
    if (with_derivs) {
      ev.grad += cgrad / slack;
      ev.hess += (cgrad * cgrad.transpose()) / (slack * slack);
      for (const auto& lt : c.logs) {
        const double arg = lt.a.dot(x);
        ev.hess += (lt.alpha / (arg * arg * kLn2 * slack)) *
                   (lt.a * lt.a.transpose());
      }
    }
  }

  // gamma log-det barriers
  for (int k = 0; k < pd.n_users; ++k) {
    const Eigen::MatrixXcd g =
        unpack_hermitian(x.data() + k * pd.params_per_gamma, pd.n);
    Eigen::LLT<Eigen::MatrixXcd> llt(g);
    if (llt.info() != Eigen::Success) return ev;
    double logdet = 0.0;
    for (int d = 0; d < pd.n; ++d) {
      const double l = llt.matrixLLT()(d, d).real();
      if (!(l > 0.0)) return ev;
      logdet += std::log(l);
    }
    psi -= 2.0 * logdet;

    if (with_derivs) {
      const Eigen::MatrixXcd ginv =
          llt.solve(Eigen::MatrixXcd::Identity(pd.n, pd.n));
      const int off = k * pd.params_per_gamma;
      ev.grad.segment(off, pd.params_per_gamma) -= herm_coeffs(ginv);

      // basis images M_p = Ginv * B_p, with B_p the sparse Hermitian basis
      const int n = pd.n;
      std::vector<Eigen::MatrixXcd> mp;
      mp.reserve(pd.params_per_gamma);
      for (int d = 0; d < n; ++d) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        m.col(d) = ginv.col(d);
        mp.push_back(std::move(m));
      }
      for (int r = 0; r < n; ++r) {
        for (int cc = r + 1; cc < n; ++cc) {
          Eigen::MatrixXcd mre = Eigen::MatrixXcd::Zero(n, n);
          mre.col(cc) = ginv.col(r);
          mre.col(r) += ginv.col(cc);
          mp.push_back(std::move(mre));
          Eigen::MatrixXcd mim = Eigen::MatrixXcd::Zero(n, n);
          mim.col(cc) = std::complex<double>(0, 1) * ginv.col(r);
          mim.col(r) -= std::complex<double>(0, 1) * ginv.col(cc);
          mp.push_back(std::move(mim));
        }
      }
      for (int p = 0; p < pd.params_per_gamma; ++p) {
        for (int q = p; q < pd.params_per_gamma; ++q) {
          const double h =
              (mp[p].array() * mp[q].transpose().array()).sum().real();
          ev.hess(off + p, off + q) += h;
          if (q != p) ev.hess(off + q, off + p) += h;
        }
      }
    }
  }

  ev.value = psi;
  ev.feasible = true;
  return ev;
}

}  // namespace

void MMSettings::validate() const {
  if (epsilon <= 0.0 || solver_tol <= 0.0 || rank_tol <= 0.0 || max_iters < 1) {
    throw std::invalid_argument("MMSettings: all fields must be positive");
  }
}

TransformedPoint solve_subproblem(const TransformedPoint& anchor, const ChannelSet& ch,
                                  const Budgets& budgets, const NoiseLevels& noise,
                                  const MMSettings& settings) {
  settings.validate();
  const ProblemData pd = build_problem(anchor, ch, budgets, noise);

  Eigen::VectorXd x(pd.dim);
  for (int k = 0; k < pd.n_users; ++k) {
    pack_hermitian(anchor.gamma[k], x.data() + k * pd.params_per_gamma);
  }
  x.segment(pd.off_omega_tx, pd.n_tx) = anchor.omega_tx;
  x.segment(pd.off_omega_rx, pd.n_rx) = anchor.omega_rx;
  x(pd.off_z) = anchor.z;

  {
    const BarrierEval probe = eval_barrier(pd, x, 1.0, false);
    if (!probe.feasible) {
      throw SolverError("solve_subproblem: anchor not strictly feasible");
    }
  }

  // null-space basis of the normalization row (equality handled by reduction)
  Eigen::MatrixXd a_mat = pd.norm_row;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a_mat);
  const Eigen::MatrixXd q_full =
      qr.householderQ() * Eigen::MatrixXd::Identity(pd.dim, pd.dim);
  const Eigen::MatrixXd null_basis = q_full.rightCols(pd.dim - 1);

  const double mu = 20.0;
  double t = 1.0;
  const double gap_target = settings.solver_tol;
  const int max_outer = 64;
  const int max_newton = 200;

  for (int outer = 0; outer < max_outer; ++outer) {
    for (int it = 0;; ++it) {
      if (it >= max_newton) {
        throw SolverError("solve_subproblem: Newton iteration limit reached");
      }
      const BarrierEval ev = eval_barrier(pd, x, t, true);
      if (!ev.feasible) {
        throw SolverError("solve_subproblem: iterate left the feasible region");
      }
      const Eigen::VectorXd gy = null_basis.transpose() * ev.grad;
      Eigen::MatrixXd hy =
          null_basis.transpose() * ev.hess * null_basis;
      Eigen::LLT<Eigen::MatrixXd> llt(hy);
      if (llt.info() != Eigen::Success) {
        // tiny ridge against roundoff loss of definiteness
        hy.diagonal().array() += 1e-12 * (1.0 + hy.diagonal().maxCoeff());
        llt.compute(hy);
        if (llt.info() != Eigen::Success) {
          throw SolverError("solve_subproblem: Hessian factorization failed");
        }
      }
      const Eigen::VectorXd dy = llt.solve(-gy);
      const double decrement2 = -gy.dot(dy);
      // the barrier scales with t, so an absolute decrement threshold is
      // unreachable at large t; lambda^2/t bounds the extra gap, which this
      // scaling keeps orders of magnitude below the target
      if (decrement2 / 2.0 <= 1e-11 * std::max(1.0, t)) break;

      const Eigen::VectorXd dx = null_basis * dy;
      double alpha = 1.0;
      const double slope = ev.grad.dot(dx);
      bool stepped = false;
      for (int ls = 0; ls < 80; ++ls) {
        const Eigen::VectorXd xn = x + alpha * dx;
        const BarrierEval trial = eval_barrier(pd, xn, t, false);
        if (trial.feasible && trial.value <= ev.value + 0.25 * alpha * slope) {
          x = xn;
          stepped = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!stepped) {
        // step underflow at this centering accuracy: accept current center
        break;
      }
    }
    if (pd.barrier_degree / t <= gap_target) break;
    t *= mu;
  }

  TransformedPoint out;
  out.gamma.reserve(pd.n_users);
  for (int k = 0; k < pd.n_users; ++k) {
    out.gamma.push_back(unpack_hermitian(x.data() + k * pd.params_per_gamma, pd.n));
  }
  out.omega_tx = x.segment(pd.off_omega_tx, pd.n_tx);
  out.omega_rx = x.segment(pd.off_omega_rx, pd.n_rx);
  out.z = x(pd.off_z);
  return out;
}

}  // namespace isac
