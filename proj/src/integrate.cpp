#include "epilab/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace epilab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

struct Rhs {
  const Controller& ctl;
  const OutputMap& c;
  const EpileptorParams& p;

  State operator()(const State& x) const {
    return vector_field(x, ctl.input(c.c.dot(x)), p);
  }
};

double error_norm(const State& err, const State& x_old, const State& x_new, double atol,
                  double rtol) {
  double s = 0;
  for (int i = 0; i < 6; ++i) {
    const double sc = atol + rtol * std::max(std::abs(x_old[i]), std::abs(x_new[i]));
    const double e = err[i] / sc;
    s += e * e;
  }
  return std::sqrt(s / 6.0);
}

double initial_step(const Rhs& rhs, const State& x0, const State& f0, double atol, double rtol,
                    double max_step) {
  // Hairer-Norsett-Wanner starting step heuristic, order 5.
  double d0 = 0, d1 = 0;
  for (int i = 0; i < 6; ++i) {
    const double sc = atol + rtol * std::abs(x0[i]);
    d0 += (x0[i] / sc) * (x0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / 6.0);
  d1 = std::sqrt(d1 / 6.0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, max_step);
  const State x1 = x0 + h0 * f0;
  const State f1v = rhs(x1);
  double d2 = 0;
  for (int i = 0; i < 6; ++i) {
    const double sc = atol + rtol * std::abs(x0[i]);
    const double df = (f1v[i] - f0[i]) / sc;
    d2 += df * df;
  }
  d2 = std::sqrt(d2 / 6.0) / h0;
  const double m = std::max(d1, d2);
  const double h1 = (m <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
  return std::min({100 * h0, h1, max_step});
}

}  // namespace

Trajectory integrate(const State& x0, std::pair<double, double> t_span, const Controller& ctl,
                     const OutputMap& c, const EpileptorParams& p, const SolverOptions& opts) {
  opts.validate();
  p.validate();
  if (!(t_span.second > t_span.first))
    throw std::invalid_argument("integrate: t_span must be increasing");
  if (!x0.allFinite()) throw DomainError("integrate: non-finite initial state");

  const Rhs rhs{ctl, c, p};
  const double atol = opts.abs_tol, rtol = opts.rel_tol;

  Trajectory traj;
  double t = t_span.first;
  State x = x0;
  State k1 = rhs(x);

  auto record = [&](double ti, const State& xi) {
    traj.times.push_back(ti);
    traj.states.push_back(xi);
    const double y = c.c.dot(xi);
    traj.outputs.push_back(y);
    traj.inputs.push_back(ctl.input(y));
  };
  record(t, x);

  double h = opts.first_step > 0 ? std::min(opts.first_step, opts.max_step)
                                 : initial_step(rhs, x, k1, atol, rtol, opts.max_step);
  double err_prev = 1.0;  // PI controller memory

  for (std::uint64_t step = 0; t < t_span.second; ++step) {
    if (step >= opts.max_steps)
      throw IntegrationError("integrate: max step count exceeded", t, x);
    h = std::min(h, t_span.second - t);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      throw StepUnderflowError("integrate: step size underflow (stiffness failure)", t, x);

    const State k2 = rhs(x + h * (A21 * k1));
    const State k3 = rhs(x + h * (A31 * k1 + A32 * k2));
    const State k4 = rhs(x + h * (A41 * k1 + A42 * k2 + A43 * k3));
    const State k5 = rhs(x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    const State k6 = rhs(x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    const State x_new = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    const State k7 = rhs(x_new);  // FSAL
    const State err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

    if (!x_new.allFinite())
      throw BlowUpError("integrate: state diverged (non-finite)", t + h, x);

    const double en = error_norm(err, x, x_new, atol, rtol);
    if (en <= 1.0) {
      t += h;
      x = x_new;
      k1 = k7;
      record(t, x);
      // PI step control (beta = 0.04 stabilization)
      const double fac =
          0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.04);
      h = std::min(h * std::clamp(fac, 0.2, 10.0), opts.max_step);
      err_prev = std::max(en, 1e-10);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  return traj;
}

std::vector<std::pair<double, double>> phase_plane(const Trajectory& traj, int i, int j) {
  if (i < 0 || i > 5 || j < 0 || j > 5)
    throw std::out_of_range("phase_plane: coordinate index out of range");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(traj.size());
  for (const State& s : traj.states) pts.emplace_back(s[i], s[j]);
  return pts;
}

}  // namespace epilab
