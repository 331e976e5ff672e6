#include "epilab/batch.hpp"

#include <cstdlib>
#include <cstring>

namespace epilab {

bool avx2_supported() {
#if defined(EPILAB_HAVE_AVX2_KERNEL) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

MarginKernelFn pick_kernel(const char** name) {
  const char* env = std::getenv("EPILAB_SIMD");
  const bool force_scalar = env && std::strcmp(env, "scalar") == 0;
  const bool force_avx2 = env && std::strcmp(env, "avx2") == 0;
#if defined(EPILAB_HAVE_AVX2_KERNEL)
  if (force_avx2 || (!force_scalar && avx2_supported())) {
    *name = "avx2";
    return &batch_margins_avx2;
  }
#else
  (void)force_avx2;
  (void)force_scalar;
#endif
  *name = "scalar";
  return &batch_margins_scalar;
}

struct Dispatch {
  MarginKernelFn fn;
  const char* name;
  Dispatch() { fn = pick_kernel(&name); }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

MarginKernelFn active_margin_kernel() { return dispatch().fn; }

std::string active_margin_kernel_name() { return dispatch().name; }

}  // namespace epilab
