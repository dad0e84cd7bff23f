#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rgym/core/params.hpp"
#include "rgym/core/space.hpp"

namespace rgym {

/// One pipeline step. True and observed channels are kept side by side; when
/// `fired` is empty every observed field equals its true counterpart.
struct StepTranscript {
  std::size_t t = 0;
  StateValue true_state;
  StateValue observed_state;
  ActionValue agent_action;
  ActionValue executed_action;
  double true_reward = 0.0;
  double observed_reward = 0.0;
  double true_cost = 0.0;
  double observed_cost = 0.0;
  std::vector<std::string> fired;  // disruptor ids, declaration order
  ParamMap env_params_snapshot;
  StateValue next_state;
  bool terminated = false;
  bool truncated = false;
  std::size_t clamp_count = 0;           // action clips, param clamps, region clamps
  std::size_t adversary_violations = 0;  // adversary replies outside their region

  bool episode_over() const noexcept { return terminated || truncated; }

  bool operator==(const StepTranscript&) const = default;
};

}  // namespace rgym
