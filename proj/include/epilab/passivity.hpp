#pragma once

#include <optional>

#include "epilab/model.hpp"

namespace epilab {

// Convention flag for quadratic storage functions: V = xt^T P xt (One) or
// V = 0.5 xt^T P xt (Half). The two differ by sqrt(2) in every radius that
// is derived from a level value, so the flag travels with the matrix.
enum class StorageScale { One, Half };

struct StorageCertificate {
  Mat6 P = Mat6::Identity();
  StorageScale scale = StorageScale::One;

  // Matrix of the quadratic form in function convention.
  Mat6 q() const { return scale == StorageScale::Half ? Mat6(0.5 * P) : P; }
};

struct MatchingResult {
  double residual = 0.0;  // ||P g - c||_inf
  bool ok = false;
};

// Throws std::invalid_argument if P is not symmetric (tolerance 1e-12
// relative to its norm).
MatchingResult check_matching(const Mat6& P, const Vec6& g, const Vec6& c, double tol);

struct DissipationResult {
  double margin = 0.0;  // -lambda_max(A^T P + P A)
  bool ok = false;
};

// strict: margin > 0; non-strict: margin >= -1e-9 * ||A^T P + P A||.
DissipationResult check_dissipation(const Mat6& P, const Mat6& A, bool strict);

struct PassivityCertificate {
  Mat6 P;
  bool strict = false;
  double matching_residual = 0.0;
  double dissipation_margin = 0.0;
  double psd_margin = 0.0;  // lambda_min(P)
  bool valid = false;
  bool degenerate = false;  // P = 0 / c = 0 corner
};

// Bundles the three positive-real conditions (P psd, dissipation, P g = c).
// "valid" with strict=true additionally requires psd_margin > 0.
PassivityCertificate verify_linear_passivity(const Mat6& A, const Vec6& g, const Vec6& c,
                                             const Mat6& P, bool strict = true,
                                             double matching_tol = 1e-9);

struct ObstructionResult {
  double g_dot_c = 0.0;  // c1 + c3
  bool passivatable = false;
};

// Necessary matching condition on the output: passivation requires
// g^T c = c1 + c3 > 0.
ObstructionResult matching_obstruction(const OutputMap& c);

// grad V(xt)^T f_cl(x_star + xt) + eps |xt|^2; negative means the Lyapunov
// decrease condition holds at this point.
double lyapunov_decrease_margin(const Vec6& xt, const StorageCertificate& cert,
                                const FeedbackLaw& law, const OutputMap& c, const State& x_star,
                                const EpileptorParams& p, double eps = 1e-6);

// Vdot - v*yt along the shifted closed-loop dynamics with exogenous port
// input v; <= 0 is required for passivity at this point.
double passivity_inequality_margin(const Vec6& xt, double v, const StorageCertificate& cert,
                                   const FeedbackLaw& law, const OutputMap& c,
                                   const State& x_star, const EpileptorParams& p);

// sqrt(rho / lambda_min(scale * P)). Throws std::domain_error when rho <= 0
// or the scaled matrix is not positive definite.
double roa_radius(const Mat6& P, double rho, StorageScale scale = StorageScale::One);

double lambda_min_sym(const Mat6& M);
double lambda_max_sym(const Mat6& M);

}  // namespace epilab
