#include "epilab/equilibria.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace epilab {

double spectral_abscissa(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || !M.allFinite())
    throw std::invalid_argument("spectral_abscissa: need a finite square matrix");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_abscissa: eigenvalue iteration did not converge");
  return es.eigenvalues().real().maxCoeff();
}

Mat6 closed_loop_jacobian(const Mat6& A, double k, const OutputMap& c) {
  return A - k * input_vector() * c.c.transpose();
}

Mat6 closed_loop_jacobian(const Equilibrium& eq, double k, const OutputMap& c) {
  return closed_loop_jacobian(eq.jacobian, k, c);
}

namespace {

template <typename Residual, typename Jac>
std::optional<State> newton(const State& seed, Residual r, Jac jac_fn, double tol, int max_iter) {
  State x = seed;
  for (int it = 0; it < max_iter; ++it) {
    State res;
    try {
      res = r(x);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    const double rn = res.norm();
    if (rn <= tol) return x;
    const Mat6 J = jac_fn(x);
    Eigen::PartialPivLU<Mat6> lu(J);
    const State dx = lu.solve(-res);
    if (!dx.allFinite()) return std::nullopt;
    x += dx;
    if (!x.allFinite() || x.norm() > 1e8) return std::nullopt;
  }
  return std::nullopt;
}

// Seeds consistent with the equilibrium relations y1 = y0 - 5 x1^2,
// zeta = 0.1 x1, z = 4 (x1 - x0); y2 per f2 branch.
std::vector<State> seed_grid(const EpileptorParams& p) {
  std::vector<State> seeds;
  for (int bx2 = 0; bx2 < 2; ++bx2) {
    for (double s1 = -3.0; s1 <= 3.0 + 1e-12; s1 += 0.5) {
      for (double s2 = -3.0; s2 <= 3.0 + 1e-12; s2 += 0.5) {
        State x;
        x[idx::x1] = s1;
        x[idx::y1] = p.y0 - 5.0 * s1 * s1;
        x[idx::x2] = s2;
        x[idx::y2] = bx2 ? std::max(0.0, 6.0 * (s2 + 0.25)) : 0.0;
        x[idx::zeta] = 0.1 * s1;
        x[idx::z] = 4.0 * (s1 - p.x0);
        seeds.push_back(x);
      }
    }
  }
  return seeds;
}

template <typename Residual, typename Jac>
std::vector<Equilibrium> collect(const std::vector<State>& seeds, Residual r, Jac jac_fn,
                                 double u_star, const EpileptorParams& p) {
  std::vector<Equilibrium> out;
  for (const State& s : seeds) {
    auto refined = newton(s, r, jac_fn, 1e-12, 80);
    if (!refined) continue;
    const State& x = *refined;
    const double rn = r(x).norm();
    if (rn > 1e-9) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
      return (e.x_star - x).cwiseAbs().maxCoeff() < 1e-6;
    });
    if (dup) continue;
    Equilibrium eq;
    eq.x_star = x;
    eq.u_star = u_star;
    eq.residual_norm = rn;
    eq.jacobian = jacobian(x, p);
    eq.spectral_abscissa = spectral_abscissa(eq.jacobian);
    eq.branch_signature = {x[idx::x1] < 0, x[idx::x2] >= -0.25};
    out.push_back(eq);
  }
  std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
    for (int i = 0; i < 6; ++i) {
      if (a.x_star[i] != b.x_star[i]) return a.x_star[i] < b.x_star[i];
    }
    return false;
  });
  return out;
}

}  // namespace

std::optional<State> newton_refine(const State& seed, double u_star, const EpileptorParams& p,
                                   double tol, int max_iter) {
  const Vec6 g = input_vector();
  auto r = [&](const State& x) -> State { return autonomous_field(x, p) + g * u_star; };
  auto j = [&](const State& x) { return jacobian(x, p); };
  return newton(seed, r, j, tol, max_iter);
}

std::optional<State> newton_refine_closed(const State& seed, const FeedbackLaw& law,
                                          const OutputMap& c, const EpileptorParams& p,
                                          double tol, int max_iter) {
  auto r = [&](const State& x) -> State { return closed_loop_field(x, law, c, 0.0, p); };
  auto j = [&](const State& x) -> Mat6 {
    return jacobian(x, p) - law.k * input_vector() * c.c.transpose();
  };
  return newton(seed, r, j, tol, max_iter);
}

std::vector<Equilibrium> find_equilibria(double u_star, const EpileptorParams& p,
                                         const std::vector<State>& extra_seeds) {
  if (!std::isfinite(u_star)) throw std::invalid_argument("find_equilibria: non-finite u_star");
  p.validate();
  const Vec6 g = input_vector();
  auto r = [&](const State& x) -> State { return autonomous_field(x, p) + g * u_star; };
  auto j = [&](const State& x) { return jacobian(x, p); };
  std::vector<State> seeds = seed_grid(p);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  return collect(seeds, r, j, u_star, p);
}

std::vector<Equilibrium> find_equilibria_closed(const FeedbackLaw& law, const OutputMap& c,
                                                const EpileptorParams& p) {
  law.validate();
  p.validate();
  auto r = [&](const State& x) -> State { return closed_loop_field(x, law, c, 0.0, p); };
  auto j = [&](const State& x) -> Mat6 {
    return jacobian(x, p) - law.k * input_vector() * c.c.transpose();
  };
  return collect(seed_grid(p), r, j, law.u_star, p);
}

}  // namespace epilab
