#pragma once

#include <string_view>

#include "rgym/core/environment.hpp"

namespace rgym::envs {

struct PendulumParams {
  double gravity = 9.81;
  double length = 0.4;
  double wind = 1.0;
};

namespace pendulum {
inline constexpr double kMass = 1.0;
inline constexpr double kDamping = 0.05;
inline constexpr double kDt = 0.05;
inline constexpr double kMaxTorque = 2.0;
inline constexpr double kMaxSpeed = 8.0;
inline constexpr std::size_t kHorizon = 200;
}  // namespace pendulum

struct PendulumStep {
  double theta = 0.0;
  double theta_dot = 0.0;
  double reward = 0.0;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double theta) noexcept;

/// Semi-implicit Euler step of the damped, wind-driven pendulum with theta = 0
/// upright:
///   acc = (g/L) sin(theta) - b*theta_dot + (u + w) / (m L^2)
///   theta_dot' = clip(theta_dot + dt*acc, +-8), theta' = wrap(theta + dt*theta_dot')
/// The reward -(theta^2 + 0.1 theta_dot'^2 + 0.001 u^2) uses the pre-step angle
/// and the post-step velocity. Throws EnvironmentFault on non-finite input.
PendulumStep pendulum_dynamics(double theta, double theta_dot, double u, const PendulumParams& p);

/// Parameters: gravity [4.9, 19.82] nominal 9.81, wind [0, 2] nominal 1,
/// length [0.1, 0.8] nominal 0.4. State (theta, theta_dot), action torque in
/// [-2, 2]. Never terminates; truncates at the horizon.
class WindyPendulum : public ForkableEnvironment<WindyPendulum> {
 public:
  explicit WindyPendulum(std::size_t horizon = pendulum::kHorizon);

  std::string_view id() const override { return "windy_pendulum"; }
  const SpaceSpec& state_space() const override { return state_space_; }
  const SpaceSpec& action_space() const override { return action_space_; }

  PendulumParams current_params() const;

 protected:
  StateValue initial_state(Rng& rng) override;
  StepOutcome transition(const ActionValue& action, Rng& rng) override;

 private:
  SpaceSpec state_space_;
  SpaceSpec action_space_;
};

}  // namespace rgym::envs
