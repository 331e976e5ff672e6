#include "epilab/batch.hpp"

namespace epilab {

// Reference kernel. Compiled with -ffp-contract=off so its rounding is a
// fixed baseline for the SIMD equivalence tests.
void batch_margins_scalar(const MarginProblem& mp, const double* const xt[6], std::size_t n,
                          double* margins) {
  const EpileptorParams& p = mp.params;
  const double inv_tau1 = 1.0 / p.tau1, inv_tau2 = 1.0 / p.tau2, inv_tau0 = 1.0 / p.tau0;
  const double xs0 = mp.x_star[0], xs1 = mp.x_star[1], xs2 = mp.x_star[2], xs3 = mp.x_star[3],
               xs4 = mp.x_star[4], xs5 = mp.x_star[5];

  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = xt[0][i], t1 = xt[1][i], t2 = xt[2][i], t3 = xt[3][i], t4 = xt[4][i],
                 t5 = xt[5][i];
    const double x1 = xs0 + t0, y1 = xs1 + t1, x2 = xs2 + t2, y2 = xs3 + t3, ze = xs4 + t4,
                 z = xs5 + t5;

    const double y = mp.c[0] * x1 + mp.c[1] * y1 + mp.c[2] * x2 + mp.c[3] * y2 + mp.c[4] * ze +
                     mp.c[5] * z;
    const double u = mp.u_star - mp.k * (y - mp.y_star);

    const double w = z - 4.0;
    const double f1v = x1 < 0 ? x1 * x1 * x1 - 3.0 * x1 * x1 : (x2 - 0.6 * w * w) * x1;
    const double f2v = x2 >= -0.25 ? 6.0 * (x2 + 0.25) : 0.0;

    const double F0 = y1 - f1v - z + p.i_rest1 + u;
    const double F1 = (p.y0 - 5.0 * x1 * x1 - y1) * inv_tau1;
    const double F2 = -y2 + x2 - x2 * x2 * x2 + 2.0 * ze - 0.3 * (z - 3.5) + p.i_rest2 + u;
    const double F3 = (-y2 + f2v) * inv_tau2;
    const double F4 = -p.gamma * (ze - 0.1 * x1);
    const double F5 = (4.0 * (x1 - p.x0) - z) * inv_tau0;

    double m = mp.eps * (t0 * t0 + t1 * t1 + t2 * t2 + t3 * t3 + t4 * t4 + t5 * t5);
    const double F[6] = {F0, F1, F2, F3, F4, F5};
    const double t[6] = {t0, t1, t2, t3, t4, t5};
    for (int r = 0; r < 6; ++r) {
      double g = 0;
      for (int cc = 0; cc < 6; ++cc) g += mp.Q(r, cc) * t[cc];
      m += 2.0 * g * F[r];
    }
    margins[i] = m;
  }
}

}  // namespace epilab
