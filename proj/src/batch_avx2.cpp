#include "epilab/batch.hpp"

#if defined(EPILAB_HAVE_AVX2_KERNEL)

#include <immintrin.h>

namespace epilab {

namespace {

inline __m256d load4(const double* p) { return _mm256_loadu_pd(p); }

}  // namespace

// 4-lane AVX2/FMA variant of batch_margins_scalar. Branches in f1/f2 are
// evaluated on both sides and blended by the comparison mask; the predicates
// themselves are exact, so branch selection matches the scalar kernel
// bit-for-bit.
void batch_margins_avx2(const MarginProblem& mp, const double* const xt[6], std::size_t n,
                        double* margins) {
  const EpileptorParams& p = mp.params;
  const __m256d inv_tau1 = _mm256_set1_pd(1.0 / p.tau1);
  const __m256d inv_tau2 = _mm256_set1_pd(1.0 / p.tau2);
  const __m256d inv_tau0 = _mm256_set1_pd(1.0 / p.tau0);
  const __m256d y0v = _mm256_set1_pd(p.y0);
  const __m256d i1v = _mm256_set1_pd(p.i_rest1);
  const __m256d i2v = _mm256_set1_pd(p.i_rest2);
  const __m256d gammav = _mm256_set1_pd(p.gamma);
  const __m256d x0v = _mm256_set1_pd(p.x0);
  const __m256d zero = _mm256_setzero_pd();

  __m256d xs[6], cv[6];
  for (int r = 0; r < 6; ++r) {
    xs[r] = _mm256_set1_pd(mp.x_star[r]);
    cv[r] = _mm256_set1_pd(mp.c[r]);
  }
  const __m256d ustar = _mm256_set1_pd(mp.u_star);
  const __m256d kv = _mm256_set1_pd(mp.k);
  const __m256d ystar = _mm256_set1_pd(mp.y_star);
  const __m256d epsv = _mm256_set1_pd(mp.eps);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t[6], X[6];
    for (int r = 0; r < 6; ++r) {
      t[r] = load4(xt[r] + i);
      X[r] = _mm256_add_pd(xs[r], t[r]);
    }
    const __m256d x1 = X[0], y1 = X[1], x2 = X[2], y2 = X[3], ze = X[4], z = X[5];

    __m256d y = _mm256_mul_pd(cv[0], x1);
    y = _mm256_fmadd_pd(cv[1], y1, y);
    y = _mm256_fmadd_pd(cv[2], x2, y);
    y = _mm256_fmadd_pd(cv[3], y2, y);
    y = _mm256_fmadd_pd(cv[4], ze, y);
    y = _mm256_fmadd_pd(cv[5], z, y);
    const __m256d u = _mm256_fnmadd_pd(kv, _mm256_sub_pd(y, ystar), ustar);

    // f1: x1^3 - 3 x1^2 (x1 < 0)  vs  (x2 - 0.6 (z-4)^2) x1
    const __m256d x1sq = _mm256_mul_pd(x1, x1);
    const __m256d lower = _mm256_fmsub_pd(x1sq, x1, _mm256_mul_pd(_mm256_set1_pd(3.0), x1sq));
    const __m256d w = _mm256_sub_pd(z, _mm256_set1_pd(4.0));
    const __m256d upper = _mm256_mul_pd(
        _mm256_fnmadd_pd(_mm256_set1_pd(0.6), _mm256_mul_pd(w, w), x2), x1);
    const __m256d neg_mask = _mm256_cmp_pd(x1, zero, _CMP_LT_OQ);
    const __m256d f1v = _mm256_blendv_pd(upper, lower, neg_mask);

    // f2: 6 (x2 + 0.25) for x2 >= -0.25, else 0
    const __m256d f2raw = _mm256_mul_pd(_mm256_set1_pd(6.0),
                                        _mm256_add_pd(x2, _mm256_set1_pd(0.25)));
    const __m256d ge_mask = _mm256_cmp_pd(x2, _mm256_set1_pd(-0.25), _CMP_GE_OQ);
    const __m256d f2v = _mm256_and_pd(f2raw, ge_mask);

    __m256d F[6];
    F[0] = _mm256_add_pd(_mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(y1, f1v), z), i1v), u);
    F[1] = _mm256_mul_pd(
        _mm256_sub_pd(_mm256_fnmadd_pd(_mm256_set1_pd(5.0), x1sq, y0v), y1), inv_tau1);
    const __m256d x2cube = _mm256_mul_pd(_mm256_mul_pd(x2, x2), x2);
    __m256d f2acc = _mm256_sub_pd(_mm256_sub_pd(x2, x2cube), y2);
    f2acc = _mm256_fmadd_pd(_mm256_set1_pd(2.0), ze, f2acc);
    f2acc = _mm256_fnmadd_pd(_mm256_set1_pd(0.3), _mm256_sub_pd(z, _mm256_set1_pd(3.5)), f2acc);
    F[2] = _mm256_add_pd(_mm256_add_pd(f2acc, i2v), u);
    F[3] = _mm256_mul_pd(_mm256_sub_pd(f2v, y2), inv_tau2);
    F[4] = _mm256_sub_pd(
        zero, _mm256_mul_pd(gammav, _mm256_fnmadd_pd(_mm256_set1_pd(0.1), x1, ze)));
    F[5] = _mm256_mul_pd(
        _mm256_fmsub_pd(_mm256_set1_pd(4.0), _mm256_sub_pd(x1, x0v), z), inv_tau0);

    __m256d norm2 = _mm256_mul_pd(t[0], t[0]);
    for (int r = 1; r < 6; ++r) norm2 = _mm256_fmadd_pd(t[r], t[r], norm2);
    __m256d m = _mm256_mul_pd(epsv, norm2);
    for (int r = 0; r < 6; ++r) {
      __m256d g = _mm256_mul_pd(_mm256_set1_pd(mp.Q(r, 0)), t[0]);
      for (int cc = 1; cc < 6; ++cc)
        g = _mm256_fmadd_pd(_mm256_set1_pd(mp.Q(r, cc)), t[cc], g);
      m = _mm256_fmadd_pd(_mm256_add_pd(g, g), F[r], m);
    }
    _mm256_storeu_pd(margins + i, m);
  }

  if (i < n) {
    const double* tail[6] = {xt[0] + i, xt[1] + i, xt[2] + i, xt[3] + i, xt[4] + i, xt[5] + i};
    batch_margins_scalar(mp, tail, n - i, margins + i);
  }
}

}  // namespace epilab

#endif  // EPILAB_HAVE_AVX2_KERNEL
