#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "epilab/model.hpp"

namespace epilab {

struct SolverOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 1.0;
  double first_step = 0.0;  // 0 = choose automatically
  std::uint64_t max_steps = 200'000'000;

  void validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0) || !(max_step > 0))
      throw std::invalid_argument("SolverOptions: tolerances and max_step must be > 0");
  }
};

// Either a constant baseline input or an output feedback law; v is a constant
// exogenous port input added on top (enters through g like u).
struct Controller {
  std::variant<double, FeedbackLaw> law = 0.0;
  double v = 0.0;

  double input(double y) const {
    if (std::holds_alternative<double>(law)) return std::get<double>(law) + v;
    return std::get<FeedbackLaw>(law).control(y, v);
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> inputs;
  std::vector<double> outputs;

  std::size_t size() const { return times.size(); }
};

struct IntegrationError : std::runtime_error {
  double t_fail;
  State last_state;
  IntegrationError(const std::string& msg, double t, const State& x)
      : std::runtime_error(msg), t_fail(t), last_state(x) {}
};

struct BlowUpError : IntegrationError {
  using IntegrationError::IntegrationError;
};

struct StepUnderflowError : IntegrationError {
  using IntegrationError::IntegrationError;
};

// Adaptive Dormand-Prince 5(4) with PI step-size control. Records every
// accepted step. Throws BlowUpError / StepUnderflowError with the last valid
// state on failure.
Trajectory integrate(const State& x0, std::pair<double, double> t_span, const Controller& ctl,
                     const OutputMap& c, const EpileptorParams& p, const SolverOptions& opts);

// Projection of the trajectory onto a coordinate pair. Throws
// std::out_of_range for indices outside 0..5.
std::vector<std::pair<double, double>> phase_plane(const Trajectory& traj, int i, int j);

}  // namespace epilab
