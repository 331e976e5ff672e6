#include "epilab/sweep.hpp"

#include <cmath>

#include "epilab/parallel.hpp"

namespace epilab {

std::size_t SweepGrid::stable_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < abscissa.size(); ++i)
    if (found[i] && abscissa[i] < 0) ++n;
  return n;
}

namespace {

// Operating branch: x1 < 0 with the leftmost lower-branch x2 root
// (x2 < -0.25, y2 = 0). This is the branch the nominal feedback stabilizes.
std::optional<State> operating_equilibrium(double u, const EpileptorParams& p) {
  auto eqs = find_equilibria(u, p);
  std::optional<State> best;
  for (const auto& e : eqs) {
    if (!(e.branch_signature.first && !e.branch_signature.second)) continue;
    if (!best || e.x_star[idx::x2] < (*best)[idx::x2]) best = e.x_star;
  }
  return best;
}

}  // namespace

SweepGrid stability_sweep(const SweepAxis& u_range, const SweepAxis& k_range, const OutputMap& c,
                          const EpileptorParams& p, int threads) {
  SweepGrid grid;
  grid.u_axis = u_range.values();
  grid.k_axis = k_range.values();
  grid.c = c;
  if (grid.u_axis.empty() || grid.k_axis.empty())
    throw std::invalid_argument("stability_sweep: empty axis");
  const std::size_t nu = grid.u_axis.size(), nk = grid.k_axis.size();
  grid.abscissa.assign(nu * nk, std::numeric_limits<double>::quiet_NaN());
  grid.found.assign(nu * nk, 0);

  // Track the operating equilibrium across u columns by continuation.
  std::vector<std::optional<State>> eq_per_u(nu);
  std::optional<State> prev;
  for (std::size_t iu = 0; iu < nu; ++iu) {
    const double u = grid.u_axis[iu];
    std::optional<State> x;
    if (prev) {
      x = newton_refine(*prev, u, p);
      if (x && !((*x)[idx::x1] < 0 && (*x)[idx::x2] < -0.25)) x.reset();
    }
    if (!x) x = operating_equilibrium(u, p);
    eq_per_u[iu] = x;
    prev = x;
  }

  const Vec6 g = input_vector();
  parallel_for(nu * nk, resolve_threads(threads), [&](std::size_t cell) {
    const std::size_t iu = cell / nk, ik = cell % nk;
    if (!eq_per_u[iu]) return;
    const Mat6 A = jacobian(*eq_per_u[iu], p);
    const Mat6 Acl = A - grid.k_axis[ik] * g * c.c.transpose();
    grid.abscissa[cell] = spectral_abscissa(Acl);
    grid.found[cell] = 1;
  });
  return grid;
}

}  // namespace epilab
