#include "rgym/envs/windy_pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rgym/core/errors.hpp"

namespace rgym::envs {

using std::numbers::pi;

double wrap_angle(double theta) noexcept {
  double r = std::remainder(theta, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  if (r > pi) r -= 2.0 * pi;
  return r;
}

PendulumStep pendulum_dynamics(double theta, double theta_dot, double u, const PendulumParams& p) {
  if (!std::isfinite(theta) || !std::isfinite(theta_dot) || !std::isfinite(u))
    throw EnvironmentFault("windy_pendulum: non-finite state or action");
  const double acc = (p.gravity / p.length) * std::sin(theta) - pendulum::kDamping * theta_dot +
                     (u + p.wind) / (pendulum::kMass * p.length * p.length);
  PendulumStep s;
  s.theta_dot = std::clamp(theta_dot + pendulum::kDt * acc, -pendulum::kMaxSpeed, pendulum::kMaxSpeed);
  s.theta = wrap_angle(theta + pendulum::kDt * s.theta_dot);
  s.reward = -(theta * theta + 0.1 * s.theta_dot * s.theta_dot + 0.001 * u * u);
  return s;
}

WindyPendulum::WindyPendulum(std::size_t horizon)
    : ForkableEnvironment<WindyPendulum>(HorizonSpec{horizon}),
      state_space_(SpaceSpec::box({-pi, -pendulum::kMaxSpeed}, {pi, pendulum::kMaxSpeed})),
      action_space_(SpaceSpec::box({-pendulum::kMaxTorque}, {pendulum::kMaxTorque})) {
  params_.define("gravity", 9.81, 4.9, 19.82);
  params_.define("wind", 1.0, 0.0, 2.0);
  params_.define("length", 0.4, 0.1, 0.8);
}

PendulumParams WindyPendulum::current_params() const {
  return {params_.current("gravity"), params_.current("length"), params_.current("wind")};
}

StateValue WindyPendulum::initial_state(Rng& rng) {
  const double theta = rng.uniform(-0.1, 0.1);
  const double theta_dot = rng.uniform(-0.05, 0.05);
  return Value::vector({theta, theta_dot});
}

StepOutcome WindyPendulum::transition(const ActionValue& action, Rng&) {
  const auto& x = state().as_vector();
  const PendulumStep s = pendulum_dynamics(x[0], x[1], action.as_vector()[0], current_params());
  StepOutcome out;
  out.next_state = Value::vector({s.theta, s.theta_dot});
  out.true_reward = s.reward;
  return out;
}

}  // namespace rgym::envs
