#include "epilab/roa.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "epilab/batch.hpp"
#include "epilab/equilibria.hpp"
#include "epilab/parallel.hpp"

namespace epilab {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Acklam's rational approximation of the standard normal quantile
// (|error| < 1.2e-9; sampling quality, not certification, so this is enough).
double norm_quantile(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (u < plow) {
    const double q = std::sqrt(-2 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (u > 1 - plow) {
    const double q = std::sqrt(-2 * std::log(1 - u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = u - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// 7-dimensional Kronecker (R_d) low-discrepancy sequence with a seeded
// Cranley-Patterson shift; a pure function of (seed, index).
struct Kronecker7 {
  double alpha[7];
  double shift[7];

  explicit Kronecker7(std::uint64_t seed) {
    // Unique positive root of x^8 = x + 1 (generalized golden ratio).
    double phi = 1.1;
    for (int i = 0; i < 128; ++i) phi = std::pow(1.0 + phi, 1.0 / 8.0);
    double a = 1.0;
    std::uint64_t s = seed;
    for (int j = 0; j < 7; ++j) {
      a /= phi;
      alpha[j] = a;
      shift[j] = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
    }
  }

  void point(std::size_t i, double u[7]) const {
    const double n = static_cast<double>(i + 1);
    for (int j = 0; j < 7; ++j) {
      double v = shift[j] + n * alpha[j];
      v -= std::floor(v);
      // keep the quantile argument strictly inside (0, 1)
      u[j] = std::min(std::max(v, 1e-15), 1.0 - 1e-15);
    }
  }
};

struct ShellSampler {
  Kronecker7 seq;
  Mat6 r_inv;  // inverse Cholesky factor: V(R^{-1} w) = |w|^2
  double rho;

  ShellSampler(const Mat6& Q, double rho_, std::uint64_t seed) : seq(seed), rho(rho_) {
    Eigen::LLT<Mat6> llt(Q);
    if (llt.info() != Eigen::Success)
      throw CertificateError("roa: storage matrix is not positive definite");
    r_inv = Mat6(llt.matrixU()).inverse();
  }

  Vec6 sample(std::size_t i) const {
    double u[7];
    seq.point(i, u);
    Vec6 dir;
    for (int j = 0; j < 6; ++j) dir[j] = norm_quantile(u[j]);
    const double nrm = dir.norm();
    dir = nrm > 0 ? Vec6(dir / nrm) : Vec6(Vec6::Unit(0));
    const double level = rho * (0.5 + 0.5 * u[6]);
    return r_inv * (std::sqrt(level) * dir);
  }
};

double margin_at(const MarginProblem& mp, const Vec6& xt) {
  double xs[6], m;
  const double* cols[6];
  for (int j = 0; j < 6; ++j) {
    xs[j] = xt[j];
    cols[j] = &xs[j];
  }
  batch_margins_scalar(mp, cols, 1, &m);
  return m;
}

Vec6 margin_gradient(const MarginProblem& mp, const Vec6& xt) {
  const State x = mp.x_star + xt;
  const FeedbackLaw law{mp.u_star, mp.k, mp.y_star};
  OutputMap cm;
  cm.c = mp.c;
  const State F = closed_loop_field(x, law, cm, 0.0, mp.params);
  const Mat6 Jcl = jacobian(x, mp.params) - mp.k * input_vector() * mp.c.transpose();
  return 2.0 * (mp.Q * F) + Jcl.transpose() * (2.0 * (mp.Q * xt)) + 2.0 * mp.eps * xt;
}

Vec6 project_level(const Mat6& Q, double rho, const Vec6& xt) {
  const double v = xt.dot(Q * xt);
  if (v <= rho || v <= 0) return xt;
  return Vec6(xt * std::sqrt(rho / v));
}

// Projected gradient ascent on the margin within {V <= rho}.
std::pair<double, Vec6> ascend(const MarginProblem& mp, double rho, Vec6 xt, int max_iter = 80) {
  double m = margin_at(mp, xt);
  double step = 0.05 * std::max(xt.norm(), 1e-8);
  for (int it = 0; it < max_iter; ++it) {
    const Vec6 grad = margin_gradient(mp, xt);
    const double gn = grad.norm();
    if (gn < 1e-16) break;
    bool improved = false;
    for (int half = 0; half < 25; ++half) {
      const Vec6 trial = project_level(mp.Q, rho, Vec6(xt + (step / gn) * grad));
      const double mt = margin_at(mp, trial);
      if (mt > m) {
        xt = trial;
        m = mt;
        step *= 1.4;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {m, xt};
}

}  // namespace

LevelCheckResult check_roa_level(const StorageCertificate& cert, const FeedbackLaw& law,
                                 const OutputMap& c, const State& x_star,
                                 const EpileptorParams& p, double rho, const RoaOptions& opts) {
  if (!(rho > 0)) throw std::domain_error("check_roa_level: rho must be > 0");
  const Mat6 Q = cert.q();
  const ShellSampler sampler(Q, rho, opts.seed);

  MarginProblem mp;
  mp.x_star = x_star;
  mp.Q = Q;
  mp.c = c.c;
  mp.u_star = law.u_star;
  mp.k = law.k;
  mp.y_star = law.y_star;
  mp.eps = opts.eps;
  mp.params = p;

  const std::size_t n = std::max<std::size_t>(opts.n_samples, 16);
  std::vector<double> soa[6];
  for (auto& v : soa) v.resize(n);
  std::vector<double> margins(n);

  const int threads = resolve_threads(opts.threads);
  const std::size_t chunk = 4096;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  parallel_for(n_chunks, threads, [&](std::size_t ci) {
    const std::size_t begin = ci * chunk, end = std::min(n, begin + chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const Vec6 xt = sampler.sample(i);
      for (int j = 0; j < 6; ++j) soa[j][i] = xt[j];
    }
    const double* cols[6];
    for (int j = 0; j < 6; ++j) cols[j] = soa[j].data() + begin;
    batch_margins(mp, cols, end - begin, margins.data() + begin);
  });

  // Worst `restarts` samples, deterministic tie-break by index.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t top = std::min<std::size_t>(std::max(opts.restarts, 1), n);
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (margins[a] != margins[b]) return margins[a] > margins[b];
                      return a < b;
                    });

  LevelCheckResult res;
  res.n_evals = n;
  res.worst_margin = margins[order[0]];
  Vec6 worst_point;
  for (int j = 0; j < 6; ++j) worst_point[j] = soa[j][order[0]];

  for (std::size_t r = 0; r < top; ++r) {
    Vec6 xt;
    for (int j = 0; j < 6; ++j) xt[j] = soa[j][order[r]];
    const auto [m, x_asc] = ascend(mp, rho, xt);
    if (m > res.worst_margin) {
      res.worst_margin = m;
      worst_point = x_asc;
    }
  }
  if (res.worst_margin > opts.violation_tol) res.counterexample = worst_point;
  return res;
}

RoaEstimate estimate_roa_level(const StorageCertificate& cert, const FeedbackLaw& law,
                               const OutputMap& c, const State& x_star, const EpileptorParams& p,
                               const RoaOptions& opts) {
  const Mat6 Q = cert.q();
  const double lmin = lambda_min_sym(Q);
  if (!(lmin > 0))
    throw CertificateError("estimate_roa_level: storage matrix is not positive definite");
  const Mat6 Acl = jacobian(x_star, p) - law.k * input_vector() * c.c.transpose();
  const Mat6 L = Acl.transpose() * Q + Q * Acl;
  if (!(lambda_max_sym(L) < 0))
    throw CertificateError(
        "estimate_roa_level: certificate fails the linearized dissipation check");

  RoaEstimate est;
  est.P = cert.P;
  est.scale = cert.scale;

  double lo = opts.rho_init > 0 ? opts.rho_init : lmin * 1e-4;  // ball radius 1e-2
  LevelCheckResult lc = check_roa_level(cert, law, c, x_star, p, lo, opts);
  est.n_samples += lc.n_evals;
  for (int shrink = 0; lc.counterexample && shrink < 3; ++shrink) {
    est.rho_violated = lo;
    lo *= 0.01;
    lc = check_roa_level(cert, law, c, x_star, p, lo, opts);
    est.n_samples += lc.n_evals;
  }
  if (lc.counterexample) {
    est.status = RoaStatus::CounterexampleFound;
    est.rho = lo;
    est.radius = roa_radius(cert.P, lo, cert.scale);
    est.counterexample = lc.counterexample;
    est.rho_violated = lo;
    return est;
  }

  // Grow the bracket; every probed level extends the sampled coverage since
  // consecutive shells [rho/2, rho] tile under doubling.
  double hi = lo;
  bool bracketed = false;
  for (int d = 0; d < opts.max_doublings; ++d) {
    const double trial = hi * 2;
    lc = check_roa_level(cert, law, c, x_star, p, trial, opts);
    est.n_samples += lc.n_evals;
    if (lc.counterexample) {
      hi = trial;
      bracketed = true;
      break;
    }
    hi = trial;
    lo = trial;
  }
  if (!bracketed) {
    est.status = RoaStatus::FalsificationFree;
    est.rho = lo;
    est.radius = roa_radius(cert.P, lo, cert.scale);
    return est;
  }

  est.rho_violated = hi;
  for (int it = 0; it < opts.max_bisect && hi / lo - 1 > opts.rel_tol; ++it) {
    const double mid = std::sqrt(lo * hi);
    lc = check_roa_level(cert, law, c, x_star, p, mid, opts);
    est.n_samples += lc.n_evals;
    if (lc.counterexample) {
      hi = mid;
      est.rho_violated = mid;
    } else {
      lo = mid;
    }
  }
  est.status = RoaStatus::FalsificationFree;
  est.rho = lo;
  est.radius = roa_radius(cert.P, lo, cert.scale);
  return est;
}

}  // namespace epilab
