#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace epilab {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// State ordering follows x = [x1 y1 x2 y2 zeta z]^T throughout.
using State = Vec6;

namespace idx {
inline constexpr int x1 = 0;
inline constexpr int y1 = 1;
inline constexpr int x2 = 2;
inline constexpr int y2 = 3;
inline constexpr int zeta = 4;
inline constexpr int z = 5;
}  // namespace idx

struct EpileptorParams {
  double x0 = -1.6;
  double y0 = 1.0;
  double tau1 = 1.0;
  double tau0 = 2857.0;
  double tau2 = 10.0;
  double i_rest1 = 3.1;
  double i_rest2 = 0.45;
  double gamma = 0.01;

  // Throws std::invalid_argument if a time constant or gamma is not positive.
  void validate() const;
};

// Output map y = c^T x. The standard output is y = x1 - x2.
struct OutputMap {
  Vec6 c;

  static OutputMap standard() {
    OutputMap m;
    m.c << 1, 0, -1, 0, 0, 0;
    return m;
  }
  static OutputMap from_c1_c3(double c1, double c3) {
    OutputMap m;
    m.c << c1, 0, c3, 0, 0, 0;
    return m;
  }
  double operator()(const State& x) const { return c.dot(x); }
};

// Input direction: u enters the x1 and x2 equations only.
inline const Vec6 input_vector() {
  Vec6 g;
  g << 1, 0, 1, 0, 0, 0;
  return g;
}

// u = u_star - k*(y - y_star) + v with linear phi(y) = k*y, k >= 0.
struct FeedbackLaw {
  double u_star = -0.8;
  double k = 1.0;
  double y_star = 0.0;

  double control(double y, double v = 0.0) const { return u_star - k * (y - y_star) + v; }
  void validate() const {
    if (k < 0) throw std::invalid_argument("FeedbackLaw: gain k must be >= 0");
  }
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace epilab
