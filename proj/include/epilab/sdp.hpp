#pragma once

#include <functional>
#include <vector>

#include "epilab/types.hpp"

namespace epilab {

// Affine matrix inequality S(w) = F0 + sum_i w_i F[i] >= 0 (psd).
// Scalar inequalities are 1x1 blocks.
struct LmiBlock {
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> F;
};

struct BarrierProblem {
  Eigen::VectorXd cost;  // minimize cost^T w
  std::vector<LmiBlock> blocks;
};

struct BarrierResult {
  Eigen::VectorXd w;
  double objective = 0.0;
  double gap = 0.0;  // nu / t at exit
  int iterations = 0;
  bool converged = false;
};

// Log-det barrier path following from a strictly feasible start. The
// problems here are tiny (<= ~40 variables, 6x6 blocks), so a dense Newton
// method with exact Hessians is used throughout. Deterministic.
// early_stop(w, gap) may end the outer loop once a caller-side question is
// settled (used by the phase-1 wrapper).
BarrierResult minimize_barrier(
    const BarrierProblem& prob, const Eigen::VectorXd& w0, double gap_tol = 1e-10,
    const std::function<bool(const Eigen::VectorXd&, double)>& early_stop = nullptr);

struct Phase1Result {
  Eigen::VectorXd w;
  double slack = 0.0;  // best lower bound on max_w min_b lambda_min(S_b(w))
  double slack_upper = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Maximize s subject to S_b(w) - s I >= 0 for every block; always strictly
// feasible, so it decides feasibility of the original blocks.
Phase1Result phase1_max_slack(const std::vector<LmiBlock>& blocks, const Eigen::VectorXd& w0,
                              double decide_tol = 1e-8);

// ---- design-level API ----

enum class DesignStatus { Solved, Infeasible, NonConverged };

struct DesignResult {
  DesignStatus status = DesignStatus::NonConverged;
  Mat6 P = Mat6::Zero();
  Vec6 c = Vec6::Zero();  // implied output P g
  double objective = 0.0;
  double lmi_margin = 0.0;  // -lambda_max(A^T P + P A) at the solution
  double psd_margin = 0.0;  // lambda_min(P)
  int iterations = 0;
};

struct LossSpec {
  enum class Kind { Feasibility, L1ToTarget };
  Kind kind = Kind::Feasibility;
  Vec6 target = Vec6::Zero();

  static LossSpec feasibility() { return {}; }
  static LossSpec l1_to(const Vec6& t) { return {Kind::L1ToTarget, t}; }
};

// min sum_{i!=j} |P_ij|  s.t.  P >= delta I,  A_cl^T P + P A_cl <= -eps I.
// Throws std::invalid_argument when A_cl is not Hurwitz.
DesignResult solve_sparse_lyapunov(const Mat6& A_cl, double eps = 1e-4, double delta = 1e-6);

// min loss(P g)  s.t.  A^T P + P A <= -eps I,  P >= delta I  (k = 0 regime).
// k != 0 is the non-convex variant and is rejected as unsupported.
DesignResult design_output(const Mat6& A, const Vec6& g, const LossSpec& loss,
                           double delta = 1e-6, double k = 0.0, double eps = 1e-7);

enum class KypStatus { Feasible, Infeasible, NonConverged };

struct KypResult {
  KypStatus status = KypStatus::NonConverged;
  Mat6 P = Mat6::Zero();
  double slack = 0.0;  // max-min eigenvalue slack found in phase 1
  int iterations = 0;
};

// Searches P with P >= 0, A^T P + P A <= 0 and P g = c imposed exactly by
// eliminating six degrees of freedom; infeasibility is decided by the
// phase-1 slack maximization.
KypResult kyp_feasibility(const Mat6& A, const Vec6& g, const Vec6& c_fixed);

}  // namespace epilab
