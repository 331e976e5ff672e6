#include "epilab/passivity.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace epilab {

double lambda_min_sym(const Mat6& M) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigensolve did not converge");
  return es.eigenvalues().minCoeff();
}

double lambda_max_sym(const Mat6& M) { return -lambda_min_sym(Mat6(-M)); }

namespace {

void require_symmetric(const Mat6& P, const char* what) {
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
}

}  // namespace

MatchingResult check_matching(const Mat6& P, const Vec6& g, const Vec6& c, double tol) {
  require_symmetric(P, "check_matching");
  MatchingResult r;
  r.residual = (P * g - c).cwiseAbs().maxCoeff();
  r.ok = r.residual <= tol;
  return r;
}

DissipationResult check_dissipation(const Mat6& P, const Mat6& A, bool strict) {
  require_symmetric(P, "check_dissipation");
  const Mat6 L = A.transpose() * P + P * A;
  DissipationResult r;
  r.margin = -lambda_max_sym(L);
  if (strict) {
    r.ok = r.margin > 0;
  } else {
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    r.ok = r.margin >= -1e-9 * scale;
  }
  return r;
}

PassivityCertificate verify_linear_passivity(const Mat6& A, const Vec6& g, const Vec6& c,
                                             const Mat6& P, bool strict, double matching_tol) {
  require_symmetric(P, "verify_linear_passivity");
  PassivityCertificate cert;
  cert.P = P;
  cert.strict = strict;
  cert.psd_margin = lambda_min_sym(P);
  cert.matching_residual = check_matching(P, g, c, matching_tol).residual;
  cert.dissipation_margin = check_dissipation(P, A, strict).margin;
  cert.degenerate = P.cwiseAbs().maxCoeff() == 0.0 && c.cwiseAbs().maxCoeff() == 0.0;

  const double psd_floor = -1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff());
  const bool psd_ok = strict ? cert.psd_margin > 0 : cert.psd_margin >= psd_floor;
  const bool diss_ok = check_dissipation(P, A, strict).ok;
  const bool match_ok = cert.matching_residual <= matching_tol;
  cert.valid = psd_ok && diss_ok && match_ok;
  return cert;
}

ObstructionResult matching_obstruction(const OutputMap& c) {
  ObstructionResult r;
  r.g_dot_c = input_vector().dot(c.c);
  r.passivatable = r.g_dot_c > 0;
  return r;
}

double lyapunov_decrease_margin(const Vec6& xt, const StorageCertificate& cert,
                                const FeedbackLaw& law, const OutputMap& c, const State& x_star,
                                const EpileptorParams& p, double eps) {
  if (!xt.allFinite()) throw DomainError("lyapunov_decrease_margin: non-finite point");
  const State x = x_star + xt;
  const State F = closed_loop_field(x, law, c, 0.0, p);
  const Vec6 grad = 2.0 * (cert.q() * xt);
  return grad.dot(F) + eps * xt.squaredNorm();
}

double passivity_inequality_margin(const Vec6& xt, double v, const StorageCertificate& cert,
                                   const FeedbackLaw& law, const OutputMap& c,
                                   const State& x_star, const EpileptorParams& p) {
  if (!xt.allFinite() || !std::isfinite(v))
    throw DomainError("passivity_inequality_margin: non-finite input");
  const State x = x_star + xt;
  const State F = closed_loop_field(x, law, c, v, p);
  const Vec6 grad = 2.0 * (cert.q() * xt);
  const double y_tilde = c.c.dot(xt);
  return grad.dot(F) - v * y_tilde;
}

double roa_radius(const Mat6& P, double rho, StorageScale scale) {
  if (!(rho > 0)) throw std::domain_error("roa_radius: rho must be > 0");
  const double s = scale == StorageScale::Half ? 0.5 : 1.0;
  const double lmin = s * lambda_min_sym(P);
  if (!(lmin > 0)) throw std::domain_error("roa_radius: storage matrix is not positive definite");
  return std::sqrt(rho / lmin);
}

}  // namespace epilab
