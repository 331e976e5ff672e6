#pragma once

#include "epilab/types.hpp"

namespace epilab {

// Fast-subsystem nonlinearity. Case split: cubic for x1 < 0, the
// (x2, z)-coupled branch for x1 >= 0 (boundary taken on the upper branch).
double f1(double x1, double x2, double z);

// Slow-subsystem rectifier: 6*(x2 + 0.25) for x2 >= -0.25, else 0.
double f2(double x2);

// Six derivatives of the model with total input u. Time constants divide the
// right-hand sides, i.e. this returns xdot, not tau*xdot.
// Throws DomainError on non-finite x or u.
State vector_field(const State& x, double u, const EpileptorParams& p);

// Autonomous field f(x) = vector_field(x, 0).
State autonomous_field(const State& x, const EpileptorParams& p);

double output(const State& x, const OutputMap& c);

// Analytic Jacobian of the autonomous field. Branch predicates match f1/f2
// exactly (one-sided derivatives on the switching surfaces).
Mat6 jacobian(const State& x, const EpileptorParams& p);

// vector_field with u = law.control(c^T x, v).
State closed_loop_field(const State& x, const FeedbackLaw& law, const OutputMap& c, double v,
                        const EpileptorParams& p);

}  // namespace epilab
