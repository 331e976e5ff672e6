#pragma once

#include <cstddef>
#include <string>

#include "epilab/types.hpp"

namespace epilab {

// Batched evaluation of the Lyapunov decrease margin
//   m(xt) = (2 Q xt)^T f_cl(x_star + xt) + eps * |xt|^2
// over shifted states xt stored as structure-of-arrays. Q is the matrix of
// the storage function in function convention, V(xt) = xt^T Q xt, and
// f_cl is the closed-loop field u = u_star - k (c^T x - y_star).
//
// This is the hot loop of the falsification sampler (>= 1e5 states per
// level probe), so it ships as a scalar reference kernel plus SIMD
// variants selected at runtime and equivalence-tested against the scalar.
struct MarginProblem {
  State x_star;
  Mat6 Q;
  Vec6 c;
  double u_star = 0.0;
  double k = 0.0;
  double y_star = 0.0;
  double eps = 1e-6;
  EpileptorParams params;
};

using MarginKernelFn = void (*)(const MarginProblem&, const double* const xt[6], std::size_t n,
                                double* margins);

void batch_margins_scalar(const MarginProblem& mp, const double* const xt[6], std::size_t n,
                          double* margins);

#if defined(EPILAB_HAVE_AVX2_KERNEL)
void batch_margins_avx2(const MarginProblem& mp, const double* const xt[6], std::size_t n,
                        double* margins);
#endif

bool avx2_supported();

// Kernel chosen from CPU features; EPILAB_SIMD=scalar|avx2|auto overrides.
MarginKernelFn active_margin_kernel();
std::string active_margin_kernel_name();

inline void batch_margins(const MarginProblem& mp, const double* const xt[6], std::size_t n,
                          double* margins) {
  active_margin_kernel()(mp, xt, n, margins);
}

}  // namespace epilab
