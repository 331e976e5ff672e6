#include "epilab/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "epilab/equilibria.hpp"
#include "epilab/passivity.hpp"

namespace epilab {

namespace {

bool psd_factor(const Eigen::MatrixXd& S, Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (S.size() == 1) return S(0, 0) > 0;
  llt.compute(S);
  return llt.info() == Eigen::Success;
}

double log_det_psd(const Eigen::MatrixXd& S) {
  if (S.size() == 1) return std::log(S(0, 0));
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  double ld = 0;
  for (int i = 0; i < S.rows(); ++i) ld += std::log(llt.matrixL()(i, i));
  return 2 * ld;
}

Eigen::MatrixXd assemble(const LmiBlock& b, const Eigen::VectorXd& w) {
  Eigen::MatrixXd S = b.F0;
  for (std::size_t i = 0; i < b.F.size(); ++i)
    if (b.F[i].size() > 0) S += w[static_cast<Eigen::Index>(i)] * b.F[i];
  return S;
}

bool all_pd(const BarrierProblem& prob, const Eigen::VectorXd& w) {
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (const auto& b : prob.blocks) {
    const Eigen::MatrixXd S = assemble(b, w);
    if (S.size() == 1) {
      if (!(S(0, 0) > 0)) return false;
    } else if (!psd_factor(S, llt)) {
      return false;
    }
  }
  return true;
}

}  // namespace

BarrierResult minimize_barrier(
    const BarrierProblem& prob, const Eigen::VectorXd& w0, double gap_tol,
    const std::function<bool(const Eigen::VectorXd&, double)>& early_stop) {
  const int n = static_cast<int>(prob.cost.size());
  double nu = 0;
  for (const auto& b : prob.blocks) nu += static_cast<double>(b.F0.rows());

  BarrierResult res;
  res.w = w0;
  if (!all_pd(prob, res.w))
    throw std::invalid_argument("minimize_barrier: start point is not strictly feasible");

  auto phi = [&](const Eigen::VectorXd& w, double t) {
    double v = t * prob.cost.dot(w);
    for (const auto& b : prob.blocks) v -= log_det_psd(assemble(b, w));
    return v;
  };

  double t = 1.0;
  const double mu = 8.0;
  int total_newton = 0;

  while (true) {
    // Newton-center at the current t.
    for (int inner = 0; inner < 60; ++inner) {
      Eigen::VectorXd grad = t * prob.cost;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
      for (const auto& b : prob.blocks) {
        const Eigen::MatrixXd S = assemble(b, res.w);
        const int m = static_cast<int>(S.rows());
        if (m == 1) {
          const double inv = 1.0 / S(0, 0);
          for (int i = 0; i < n; ++i) {
            if (b.F[i].size() == 0) continue;
            const double fi = b.F[i](0, 0) * inv;
            grad[i] -= fi;
            for (int j = i; j < n; ++j) {
              if (b.F[j].size() == 0) continue;
              H(i, j) += fi * b.F[j](0, 0) * inv;
            }
          }
          continue;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(S);
        // N_i = L^-1 F_i L^-T; gradient -tr(N_i), Hessian <N_i, N_j>_F
        std::vector<Eigen::MatrixXd> N(n);
        for (int i = 0; i < n; ++i) {
          if (b.F[i].size() == 0) continue;
          Eigen::MatrixXd tmp = llt.matrixL().solve(b.F[i]);
          N[i] = llt.matrixL().solve(tmp.transpose()).transpose();
          grad[i] -= N[i].trace();
        }
        for (int i = 0; i < n; ++i) {
          if (N[i].size() == 0) continue;
          for (int j = i; j < n; ++j) {
            if (N[j].size() == 0) continue;
            H(i, j) += N[i].cwiseProduct(N[j].transpose()).sum();
          }
        }
      }
      H = H.selfadjointView<Eigen::Upper>();

      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      Eigen::VectorXd d = ldlt.solve(-grad);
      if (!d.allFinite()) {
        H.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        d = H.ldlt().solve(-grad);
        if (!d.allFinite()) break;
      }
      const double decrement = -grad.dot(d);
      ++total_newton;
      if (decrement < 1e-11) break;

      const double phi0 = phi(res.w, t);
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Eigen::VectorXd trial = res.w + alpha * d;
        if (all_pd(prob, trial) && phi(trial, t) <= phi0 - 0.25 * alpha * decrement) {
          res.w = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }

    res.gap = nu / t;
    res.objective = prob.cost.dot(res.w);
    res.iterations = total_newton;
    if (early_stop && early_stop(res.w, res.gap)) {
      res.converged = true;
      return res;
    }
    if (res.gap <= gap_tol * std::max(1.0, std::abs(res.objective))) {
      res.converged = true;
      return res;
    }
    if (total_newton > 4000) return res;  // converged stays false
    t *= mu;
  }
}

Phase1Result phase1_max_slack(const std::vector<LmiBlock>& blocks, const Eigen::VectorXd& w0,
                              double decide_tol) {
  const int n = static_cast<int>(w0.size());
  BarrierProblem ext;
  ext.cost = Eigen::VectorXd::Zero(n + 1);
  ext.cost[n] = -1.0;  // maximize s
  for (const auto& b : blocks) {
    LmiBlock eb;
    eb.F0 = b.F0;
    eb.F = b.F;
    eb.F.resize(n + 1);
    eb.F[n] = -Eigen::MatrixXd::Identity(b.F0.rows(), b.F0.cols());
    ext.blocks.push_back(std::move(eb));
  }

  // s0 strictly below the worst block eigenvalue at w0.
  double smin = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    const Eigen::MatrixXd S = assemble(b, w0);
    if (S.size() == 1) {
      smin = std::min(smin, S(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
      smin = std::min(smin, es.eigenvalues().minCoeff());
    }
  }
  Eigen::VectorXd ext0(n + 1);
  ext0.head(n) = w0;
  ext0[n] = smin - 1.0 - 0.1 * std::abs(smin);

  auto early = [&](const Eigen::VectorXd& w, double gap) {
    const double lower = w[n], upper = w[n] + gap;
    return lower > decide_tol || upper < -decide_tol;
  };
  BarrierResult r = minimize_barrier(ext, ext0, 1e-12, early);

  Phase1Result out;
  out.w = r.w.head(n);
  out.slack = r.w[n];
  out.slack_upper = r.w[n] + r.gap;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

// ---- symmetric parametrization helpers ----

namespace {

struct SvecBasis {
  std::vector<std::pair<int, int>> pairs;  // upper-tri (i, j), i <= j

  SvecBasis() {
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) pairs.emplace_back(i, j);
  }
  Eigen::MatrixXd unit(int k) const {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(6, 6);
    const auto [i, j] = pairs[k];
    E(i, j) = 1;
    E(j, i) = 1;
    return E;
  }
  Eigen::VectorXd from_matrix(const Mat6& P) const {
    Eigen::VectorXd w(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) w[k] = P(pairs[k].first, pairs[k].second);
    return w;
  }
  Mat6 to_matrix(const Eigen::VectorXd& w) const {
    Mat6 P = Mat6::Zero();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      P(i, j) = w[k];
      P(j, i) = w[k];
    }
    return P;
  }
};

Eigen::MatrixXd lyap_image(const Mat6& A, const Eigen::MatrixXd& E) {
  return -(A.transpose() * E + E * A);
}

// Unique solution of A^T P + P A = -Q for Hurwitz A (dense Kronecker solve).
Mat6 solve_lyapunov(const Mat6& A, const Mat6& Q) {
  Eigen::Matrix<double, 36, 36> M = Eigen::Matrix<double, 36, 36>::Zero();
  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P), column-major vec.
  for (int c = 0; c < 6; ++c)
    for (int r = 0; r < 6; ++r) {
      const int row = c * 6 + r;
      for (int k = 0; k < 6; ++k) {
        M(row, c * 6 + k) += A.transpose()(r, k);
        M(row, k * 6 + r) += A(k, c);
      }
    }
  Eigen::Matrix<double, 36, 1> q;
  for (int c = 0; c < 6; ++c)
    for (int r = 0; r < 6; ++r) q[c * 6 + r] = -Q(r, c);
  const Eigen::Matrix<double, 36, 1> v = M.partialPivLu().solve(q);
  Mat6 P;
  for (int c = 0; c < 6; ++c)
    for (int r = 0; r < 6; ++r) P(r, c) = v[c * 6 + r];
  return Mat6(0.5 * (P + P.transpose()));
}

DesignResult finish_design(const Mat6& P, const Mat6& A, double objective, int iterations) {
  DesignResult out;
  out.status = DesignStatus::Solved;
  out.P = P;
  out.c = P * input_vector();
  out.objective = objective;
  out.psd_margin = lambda_min_sym(P);
  out.lmi_margin = -lambda_max_sym(Mat6(A.transpose() * P + P * A));
  out.iterations = iterations;
  return out;
}

}  // namespace

DesignResult solve_sparse_lyapunov(const Mat6& A_cl, double eps, double delta) {
  if (!(eps > 0) || !(delta > 0))
    throw std::invalid_argument("solve_sparse_lyapunov: eps and delta must be > 0");
  if (spectral_abscissa(A_cl) >= 0)
    throw std::invalid_argument("solve_sparse_lyapunov: matrix is not Hurwitz");

  const SvecBasis basis;
  const int np = 21;
  const auto& pairs = basis.pairs;
  std::vector<int> offdiag;  // svec indices with i != j
  for (int k = 0; k < np; ++k)
    if (pairs[k].first != pairs[k].second) offdiag.push_back(k);
  const int nt = static_cast<int>(offdiag.size());
  const int n = np + nt;

  BarrierProblem prob;
  prob.cost = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < nt; ++r) prob.cost[np + r] = 1.0;

  LmiBlock psd;  // P - delta I >= 0
  psd.F0 = -delta * Eigen::MatrixXd::Identity(6, 6);
  psd.F.resize(n);
  LmiBlock lyap;  // -(A^T P + P A) - eps I >= 0
  lyap.F0 = -eps * Eigen::MatrixXd::Identity(6, 6);
  lyap.F.resize(n);
  for (int k = 0; k < np; ++k) {
    psd.F[k] = basis.unit(k);
    lyap.F[k] = lyap_image(A_cl, basis.unit(k));
  }
  prob.blocks.push_back(std::move(psd));
  prob.blocks.push_back(std::move(lyap));
  for (int r = 0; r < nt; ++r) {  // t_r - P_k >= 0 and t_r + P_k >= 0
    for (double sgn : {-1.0, 1.0}) {
      LmiBlock sb;
      sb.F0 = Eigen::MatrixXd::Zero(1, 1);
      sb.F.resize(n);
      sb.F[offdiag[r]] = sgn * Eigen::MatrixXd::Ones(1, 1);
      sb.F[np + r] = Eigen::MatrixXd::Ones(1, 1);
      prob.blocks.push_back(std::move(sb));
    }
  }

  // Strictly feasible start from the Lyapunov equation, rescaled above the
  // psd floor.
  Mat6 P0 = solve_lyapunov(A_cl, Mat6((1.0 + eps) * Mat6::Identity()));
  const double l0 = lambda_min_sym(P0);
  if (l0 < 2 * delta) P0 *= (2 * delta) / l0;
  Eigen::VectorXd w0(n);
  w0.head(np) = basis.from_matrix(P0);
  for (int r = 0; r < nt; ++r) w0[np + r] = std::abs(w0[offdiag[r]]) + 1.0;

  const BarrierResult br = minimize_barrier(prob, w0, 1e-9);
  const Mat6 P = basis.to_matrix(br.w.head(np));
  DesignResult out = finish_design(P, A_cl, br.objective, br.iterations);
  if (!br.converged) out.status = DesignStatus::NonConverged;
  return out;
}

DesignResult design_output(const Mat6& A, const Vec6& g, const LossSpec& loss, double delta,
                           double k, double eps) {
  if (k != 0.0)
    throw std::invalid_argument(
        "design_output: k > 0 makes the program non-convex; only k = 0 is supported");
  if (!(delta > 0) || !(eps > 0))
    throw std::invalid_argument("design_output: delta and eps must be > 0");
  if (spectral_abscissa(A) >= 0)
    throw std::invalid_argument("design_output: A is not Hurwitz (u_star alone must stabilize)");

  const SvecBasis basis;
  const int np = 21;
  const bool l1 = loss.kind == LossSpec::Kind::L1ToTarget;
  const int n = l1 ? np + 6 : np;

  BarrierProblem prob;
  prob.cost = Eigen::VectorXd::Zero(n);

  LmiBlock psd;
  psd.F0 = -delta * Eigen::MatrixXd::Identity(6, 6);
  psd.F.resize(n);
  LmiBlock lyap;
  lyap.F0 = -eps * Eigen::MatrixXd::Identity(6, 6);
  lyap.F.resize(n);
  for (int kk = 0; kk < np; ++kk) {
    psd.F[kk] = basis.unit(kk);
    lyap.F[kk] = lyap_image(A, basis.unit(kk));
  }
  prob.blocks.push_back(std::move(psd));
  prob.blocks.push_back(std::move(lyap));

  if (l1) {
    for (int r = 0; r < 6; ++r) {
      prob.cost[np + r] = 1.0;
      // t_r -/+ ((P g)_r - target_r) >= 0
      for (double sgn : {-1.0, 1.0}) {
        LmiBlock sb;
        sb.F0 = Eigen::MatrixXd::Constant(1, 1, -sgn * loss.target[r]);
        sb.F.resize(n);
        for (int kk = 0; kk < np; ++kk) {
          const double coef = (basis.unit(kk) * g)(r);
          if (coef != 0) sb.F[kk] = Eigen::MatrixXd::Constant(1, 1, sgn * coef);
        }
        sb.F[np + r] = Eigen::MatrixXd::Ones(1, 1);
        prob.blocks.push_back(std::move(sb));
      }
    }
  }

  Mat6 P0 = solve_lyapunov(A, Mat6((1.0 + eps) * Mat6::Identity()));
  const double l0 = lambda_min_sym(P0);
  if (l0 < 2 * delta) P0 *= (2 * delta) / l0;
  Eigen::VectorXd w0(n);
  w0.head(np) = basis.from_matrix(P0);
  if (l1) {
    const Vec6 diff = P0 * g - loss.target;
    for (int r = 0; r < 6; ++r) w0[np + r] = std::abs(diff[r]) + 1.0;
  }

  const BarrierResult br = minimize_barrier(prob, w0, 1e-9);
  const Mat6 P = basis.to_matrix(br.w.head(np));
  DesignResult out = finish_design(P, A, l1 ? br.objective : 0.0, br.iterations);
  if (!br.converged) out.status = DesignStatus::NonConverged;
  return out;
}

KypResult kyp_feasibility(const Mat6& A, const Vec6& g, const Vec6& c_fixed) {
  // Free parameters: upper-tri entries not in row 0; row-0 entries follow
  // from P g = c with g = e1 + e3.
  const SvecBasis basis;
  std::vector<int> free_idx;
  for (int k = 0; k < 21; ++k)
    if (basis.pairs[k].first != 0) free_idx.push_back(k);
  const int n = static_cast<int>(free_idx.size());  // 15

  Mat6 Pconst = Mat6::Zero();
  Pconst(0, 0) = c_fixed[0] - c_fixed[2];
  for (int r = 1; r < 6; ++r) {
    Pconst(0, r) = c_fixed[r];
    Pconst(r, 0) = c_fixed[r];
  }
  Pconst(0, 2) = c_fixed[2];
  Pconst(2, 0) = c_fixed[2];

  // Basis matrices with B g = 0: entries of column 0 compensate column 2.
  auto free_basis = [&](int which) -> Mat6 {
    const auto [i, j] = basis.pairs[free_idx[which]];
    Mat6 B = Mat6::Zero();
    B(i, j) = 1;
    B(j, i) = 1;
    auto compensate = [&](int row, int val_col) {
      // row touches column 2 entry -> cancel through column 0
      (void)val_col;
      B(row, 0) -= 1;
      B(0, row) -= 1;
    };
    if (i == 2 && j == 2) {
      B(0, 2) -= 1;
      B(2, 0) -= 1;
      B(0, 0) += 1;
    } else if (i == 2 || j == 2) {
      compensate(i == 2 ? j : i, 2);
    }
    return B;
  };

  std::vector<LmiBlock> blocks(2);
  blocks[0].F0 = Pconst;  // P >= 0
  blocks[0].F.resize(n);
  blocks[1].F0 = lyap_image(A, Pconst);  // -(A^T P + P A) >= 0
  blocks[1].F.resize(n);
  for (int k = 0; k < n; ++k) {
    const Mat6 B = free_basis(k);
    blocks[0].F[k] = B;
    blocks[1].F[k] = lyap_image(A, B);
  }

  const Phase1Result ph = phase1_max_slack(blocks, Eigen::VectorXd::Zero(n), 1e-8);

  KypResult out;
  out.iterations = ph.iterations;
  Mat6 P = Pconst;
  for (int k = 0; k < n; ++k) P += ph.w[k] * free_basis(k);
  out.P = P;
  out.slack = ph.slack;
  if (!ph.converged) {
    out.status = KypStatus::NonConverged;
  } else if (ph.slack > 1e-8) {
    out.status = KypStatus::Feasible;
  } else if (ph.slack_upper < -1e-8) {
    out.status = KypStatus::Infeasible;
  } else {
    // Marginal: neither strictly feasible nor certifiably infeasible at
    // solver precision.
    out.status = KypStatus::NonConverged;
  }
  return out;
}

}  // namespace epilab
