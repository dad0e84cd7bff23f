#include "rgym/disrupt/schedule.hpp"

#include "rgym/core/errors.hpp"

namespace rgym::disrupt {

std::string to_string(Phase p) { return p == Phase::Train ? "train" : "eval"; }

std::string to_string(PhaseGate g) {
  switch (g) {
    case PhaseGate::TrainOnly: return "train_only";
    case PhaseGate::EvalOnly: return "eval_only";
    case PhaseGate::Both: return "both";
  }
  return "both";
}

std::string to_string(Schedule::Kind k) {
  switch (k) {
    case Schedule::Kind::EveryStep: return "every_step";
    case Schedule::Kind::EveryK: return "every_k";
    case Schedule::Kind::PerEpisode: return "per_episode";
    case Schedule::Kind::Bernoulli: return "bernoulli";
    case Schedule::Kind::EpisodeWindow: return "episode_window";
    case Schedule::Kind::Never: return "never";
  }
  return "never";
}

void validate_schedule(const Schedule& s) {
  if (s.kind == Schedule::Kind::EveryK && s.k < 1) throw ConfigError("k", "must be >= 1");
  if (s.kind == Schedule::Kind::Bernoulli && !(s.q >= 0.0 && s.q <= 1.0))
    throw ConfigError("q", "must be in [0, 1]");
  if (s.kind == Schedule::Kind::EpisodeWindow && s.from > s.to)
    throw ConfigError("from", "episode window needs from <= to");
}

bool gate_allows(PhaseGate gate, Phase phase) noexcept {
  switch (gate) {
    case PhaseGate::TrainOnly: return phase == Phase::Train;
    case PhaseGate::EvalOnly: return phase == Phase::Eval;
    case PhaseGate::Both: return true;
  }
  return false;
}

bool schedule_fires(const Schedule& s, const StepCounters& c, Phase phase, Rng& rng) {
  if (!gate_allows(s.phase, phase)) return false;
  switch (s.kind) {
    case Schedule::Kind::EveryStep: return true;
    case Schedule::Kind::EveryK: return c.step_in_episode > 0 && c.step_in_episode % s.k == 0;
    case Schedule::Kind::PerEpisode: return c.step_in_episode == 0;
    case Schedule::Kind::Bernoulli: return rng.bernoulli(s.q);
    case Schedule::Kind::EpisodeWindow: return s.from <= c.episode && c.episode <= s.to;
    case Schedule::Kind::Never: return false;
  }
  return false;
}

}  // namespace rgym::disrupt
