#pragma once

#include <optional>
#include <vector>

#include "epilab/model.hpp"

namespace epilab {

struct Equilibrium {
  State x_star;
  double u_star = 0.0;
  double residual_norm = 0.0;
  Mat6 jacobian;               // of the autonomous field at x_star
  double spectral_abscissa = 0.0;
  std::pair<bool, bool> branch_signature;  // (x1 < 0, x2 >= -0.25)
};

// Max real part over the eigenvalues. Throws std::runtime_error if the
// eigenvalue iteration fails to converge.
double spectral_abscissa(const Eigen::MatrixXd& M);

// A - k g c^T with A the equilibrium Jacobian.
Mat6 closed_loop_jacobian(const Equilibrium& eq, double k, const OutputMap& c);
Mat6 closed_loop_jacobian(const Mat6& A, double k, const OutputMap& c);

// Newton iteration on r(x) = f(x) + g*u (open loop) from a given seed.
// Returns the refined state if it converges to residual <= tol.
std::optional<State> newton_refine(const State& seed, double u_star, const EpileptorParams& p,
                                   double tol = 1e-11, int max_iter = 80);

// Newton on the closed-loop residual f(x) + g*(u_star - k (c^T x - y_star)).
std::optional<State> newton_refine_closed(const State& seed, const FeedbackLaw& law,
                                          const OutputMap& c, const EpileptorParams& p,
                                          double tol = 1e-11, int max_iter = 80);

// All equilibria of f(x) + g u_star = 0 reachable from a deterministic seed
// grid covering the four branch combinations; duplicates merged, results
// polished to residual <= 1e-9 and sorted lexicographically. An empty list is
// a valid return.
std::vector<Equilibrium> find_equilibria(double u_star, const EpileptorParams& p,
                                         const std::vector<State>& extra_seeds = {});

// Same search on the closed-loop residual (fixed y_star).
std::vector<Equilibrium> find_equilibria_closed(const FeedbackLaw& law, const OutputMap& c,
                                                const EpileptorParams& p);

}  // namespace epilab
