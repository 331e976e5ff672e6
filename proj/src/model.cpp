#include "epilab/model.hpp"

#include <cmath>

namespace epilab {

void EpileptorParams::validate() const {
  if (!(tau0 > 0) || !(tau1 > 0) || !(tau2 > 0) || !(gamma > 0))
    throw std::invalid_argument("EpileptorParams: tau0, tau1, tau2, gamma must be > 0");
}

double f1(double x1, double x2, double z) {
  if (x1 < 0) return x1 * x1 * x1 - 3.0 * x1 * x1;
  const double w = z - 4.0;
  return (x2 - 0.6 * w * w) * x1;
}

double f2(double x2) {
  return x2 >= -0.25 ? 6.0 * (x2 + 0.25) : 0.0;
}

State vector_field(const State& x, double u, const EpileptorParams& p) {
  if (!x.allFinite() || !std::isfinite(u)) throw DomainError("vector_field: non-finite input");
  const double x1 = x[idx::x1], y1 = x[idx::y1], x2 = x[idx::x2], y2 = x[idx::y2],
               zeta = x[idx::zeta], z = x[idx::z];
  State d;
  d[idx::x1] = y1 - f1(x1, x2, z) - z + p.i_rest1 + u;
  d[idx::y1] = (p.y0 - 5.0 * x1 * x1 - y1) / p.tau1;
  d[idx::x2] = -y2 + x2 - x2 * x2 * x2 + 2.0 * zeta - 0.3 * (z - 3.5) + p.i_rest2 + u;
  d[idx::y2] = (-y2 + f2(x2)) / p.tau2;
  d[idx::zeta] = -p.gamma * (zeta - 0.1 * x1);
  d[idx::z] = (4.0 * (x1 - p.x0) - z) / p.tau0;
  return d;
}

State autonomous_field(const State& x, const EpileptorParams& p) {
  return vector_field(x, 0.0, p);
}

double output(const State& x, const OutputMap& c) { return c.c.dot(x); }

Mat6 jacobian(const State& x, const EpileptorParams& p) {
  const double x1 = x[idx::x1], x2 = x[idx::x2], z = x[idx::z];
  Mat6 J = Mat6::Zero();

  // d(x1dot)/d(.) = -df1 plus the linear terms of the x1 equation
  double df1_dx1, df1_dx2, df1_dz;
  if (x1 < 0) {
    df1_dx1 = 3.0 * x1 * x1 - 6.0 * x1;
    df1_dx2 = 0.0;
    df1_dz = 0.0;
  } else {
    const double w = z - 4.0;
    df1_dx1 = x2 - 0.6 * w * w;
    df1_dx2 = x1;
    df1_dz = -1.2 * w * x1;
  }
  J(idx::x1, idx::x1) = -df1_dx1;
  J(idx::x1, idx::y1) = 1.0;
  J(idx::x1, idx::x2) = -df1_dx2;
  J(idx::x1, idx::z) = -df1_dz - 1.0;

  J(idx::y1, idx::x1) = -10.0 * x1 / p.tau1;
  J(idx::y1, idx::y1) = -1.0 / p.tau1;

  J(idx::x2, idx::x2) = 1.0 - 3.0 * x2 * x2;
  J(idx::x2, idx::y2) = -1.0;
  J(idx::x2, idx::zeta) = 2.0;
  J(idx::x2, idx::z) = -0.3;

  J(idx::y2, idx::x2) = (x2 >= -0.25 ? 6.0 : 0.0) / p.tau2;
  J(idx::y2, idx::y2) = -1.0 / p.tau2;

  J(idx::zeta, idx::x1) = 0.1 * p.gamma;
  J(idx::zeta, idx::zeta) = -p.gamma;

  J(idx::z, idx::x1) = 4.0 / p.tau0;
  J(idx::z, idx::z) = -1.0 / p.tau0;
  return J;
}

State closed_loop_field(const State& x, const FeedbackLaw& law, const OutputMap& c, double v,
                        const EpileptorParams& p) {
  const double u = law.control(output(x, c), v);
  return vector_field(x, u, p);
}

}  // namespace epilab
