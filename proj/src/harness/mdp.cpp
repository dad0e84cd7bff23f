#include "rgym/harness/mdp.hpp"

#include <algorithm>
#include <cmath>

#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"

namespace rgym::harness {

TabularMdp::TabularMdp(std::size_t s, std::size_t a)
    : states(s), actions(a), kernel(s * a * s, 0.0), reward(s * a, 0.0), terminal(s, false) {}

void check_kernel(const TabularMdp& mdp, double tol) {
  if (mdp.kernel.size() != mdp.states * mdp.actions * mdp.states || mdp.reward.size() != mdp.states * mdp.actions ||
      mdp.terminal.size() != mdp.states)
    throw DomainError("mdp arrays do not match its dimensions");
  for (std::size_t s = 0; s < mdp.states; ++s) {
    if (mdp.terminal[s]) continue;
    for (std::size_t a = 0; a < mdp.actions; ++a) {
      double sum = 0.0;
      for (std::size_t n = 0; n < mdp.states; ++n) {
        const double x = mdp.p(s, a, n);
        if (!(x >= 0.0)) throw DomainError("kernel row (" + std::to_string(s) + ", " + std::to_string(a) + ") has a negative entry");
        sum += x;
      }
      if (std::abs(sum - 1.0) > tol)
        throw DomainError("kernel row (" + std::to_string(s) + ", " + std::to_string(a) + ") sums to " + format_real(sum));
    }
  }
}

namespace {

double q_value(const TabularMdp& mdp, const std::vector<double>& v, double gamma, std::size_t s, std::size_t a) {
  double q = mdp.r(s, a);
  const double* row = &mdp.kernel[(s * mdp.actions + a) * mdp.states];
  double next = 0.0;
  for (std::size_t n = 0; n < mdp.states; ++n) next += row[n] * v[n];
  return q + gamma * next;
}

}  // namespace

ValueResult value_iteration(const TabularMdp& mdp, double gamma, double tol, std::size_t max_iterations) {
  check_kernel(mdp);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  ValueResult res;
  res.value.assign(mdp.states, 0.0);
  std::vector<double> next(mdp.states, 0.0);
  for (;;) {
    if (res.iterations == max_iterations) throw DomainError("value iteration did not converge");
    ++res.iterations;
    double delta = 0.0;
    for (std::size_t s = 0; s < mdp.states; ++s) {
      if (mdp.terminal[s]) {
        next[s] = 0.0;
        continue;
      }
      double best = -INFINITY;
      for (std::size_t a = 0; a < mdp.actions; ++a) best = std::max(best, q_value(mdp, res.value, gamma, s, a));
      next[s] = best;
      delta = std::max(delta, std::abs(best - res.value[s]));
    }
    res.value.swap(next);
    if (delta < tol) break;
  }
  res.policy.assign(mdp.states, 0);
  for (std::size_t s = 0; s < mdp.states; ++s) {
    if (mdp.terminal[s]) continue;
    double best = -INFINITY;
    for (std::size_t a = 0; a < mdp.actions; ++a) {
      const double q = q_value(mdp, res.value, gamma, s, a);
      // Near-ties within the convergence tolerance go to the lower index.
      if (q > best + 10 * tol) {
        best = q;
        res.policy[s] = a;
      }
    }
  }
  return res;
}

TabularMdp perturbed_kernel(const TabularMdp& mdp, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("replacement probability must lie in [0, 1]");
  TabularMdp out = mdp;
  const double share = p / static_cast<double>(mdp.actions);
  for (std::size_t s = 0; s < mdp.states; ++s) {
    if (mdp.terminal[s]) continue;
    std::vector<double> avg_p(mdp.states, 0.0);
    double avg_r = 0.0;
    for (std::size_t a = 0; a < mdp.actions; ++a) {
      for (std::size_t n = 0; n < mdp.states; ++n) avg_p[n] += mdp.p(s, a, n);
      avg_r += mdp.r(s, a);
    }
    for (std::size_t a = 0; a < mdp.actions; ++a) {
      double sum = 0.0;
      for (std::size_t n = 0; n < mdp.states; ++n) {
        out.p(s, a, n) = (1.0 - p) * mdp.p(s, a, n) + share * avg_p[n];
        sum += out.p(s, a, n);
      }
      for (std::size_t n = 0; n < mdp.states; ++n) out.p(s, a, n) /= sum;
      out.r(s, a) = (1.0 - p) * mdp.r(s, a) + share * avg_r;
    }
  }
  return out;
}

TabularMdp grid_maze_mdp(const envs::GridMaze& maze) {
  const envs::Board& board = maze.board();
  const double slip = maze.params().current("slip");
  TabularMdp mdp(board.cells(), envs::kGridActions);
  for (std::size_t s = 0; s < board.cells(); ++s) {
    if (s == maze.goal() || board.is_wall(s)) {
      mdp.terminal[s] = true;
      continue;
    }
    for (std::size_t a = 0; a < envs::kGridActions; ++a) {
      mdp.r(s, a) = maze.step_reward();
      mdp.p(s, a, board.move(s, static_cast<envs::GridAction>(a))) += 1.0 - slip;
      for (std::size_t b = 0; b < envs::kGridActions; ++b)
        mdp.p(s, a, board.move(s, static_cast<envs::GridAction>(b))) += slip / envs::kGridActions;
    }
  }
  return mdp;
}

}  // namespace rgym::harness
