#pragma once

#include <cstdint>
#include <optional>

#include "epilab/passivity.hpp"

namespace epilab {

struct RoaOptions {
  std::size_t n_samples = 100000;  // shell samples per level probe
  int restarts = 100;              // gradient-ascent starts from worst samples
  std::uint64_t seed = 0;
  double eps = 1e-6;               // decrease-condition slack
  double violation_tol = 1e-10;    // margin above this counts as a counterexample
  double rel_tol = 0.01;           // bisection bracket width (relative)
  int max_bisect = 32;
  int max_doublings = 60;
  double rho_init = 0.0;           // 0 = derive from lambda_min (ball radius 1e-2)
  int threads = 0;
};

enum class RoaStatus { FalsificationFree, CounterexampleFound };

struct RoaEstimate {
  Mat6 P;
  StorageScale scale = StorageScale::One;
  double rho = 0.0;     // largest level that survived falsification
  double radius = 0.0;  // sqrt(rho / lambda_min(scale * P))
  RoaStatus status = RoaStatus::FalsificationFree;
  std::size_t n_samples = 0;  // total shell samples drawn over the search
  std::optional<Vec6> counterexample;  // present iff status says so
  double rho_violated = 0.0;  // smallest probed level with a counterexample (0 if none)
};

struct LevelCheckResult {
  double worst_margin = 0.0;
  std::optional<Vec6> counterexample;  // worst point if it violates
  std::size_t n_evals = 0;
};

struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Falsification probe of one level: quasi-random sampling of the shell
// {rho/2 <= V <= rho} with the batched margin kernel, then projected
// gradient ascent from the worst `restarts` samples. Deterministic for a
// fixed seed, independent of the thread count.
LevelCheckResult check_roa_level(const StorageCertificate& cert, const FeedbackLaw& law,
                                 const OutputMap& c, const State& x_star,
                                 const EpileptorParams& p, double rho, const RoaOptions& opts);

// Bisection for the largest falsification-free level. Verifies first that
// the certificate is a strict Lyapunov matrix for the closed-loop
// linearization (throws CertificateError otherwise).
RoaEstimate estimate_roa_level(const StorageCertificate& cert, const FeedbackLaw& law,
                               const OutputMap& c, const State& x_star, const EpileptorParams& p,
                               const RoaOptions& opts);

}  // namespace epilab
