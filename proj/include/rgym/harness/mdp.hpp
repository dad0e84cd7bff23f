#pragma once

#include <cstddef>
#include <vector>

#include "rgym/envs/grid_maze.hpp"

namespace rgym::harness {

/// Explicit finite MDP. `kernel` is dense S x A x S, `reward` is the
/// expected immediate reward S x A. Terminal states have value 0.
struct TabularMdp {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<double> kernel;
  std::vector<double> reward;
  std::vector<bool> terminal;

  TabularMdp() = default;
  TabularMdp(std::size_t s, std::size_t a);

  double& p(std::size_t s, std::size_t a, std::size_t next) { return kernel[(s * actions + a) * states + next]; }
  double p(std::size_t s, std::size_t a, std::size_t next) const { return kernel[(s * actions + a) * states + next]; }
  double& r(std::size_t s, std::size_t a) { return reward[s * actions + a]; }
  double r(std::size_t s, std::size_t a) const { return reward[s * actions + a]; }
};

// Throws DomainError naming the first row (s, a) that does not sum to 1.
void check_kernel(const TabularMdp& mdp, double tol = 1e-9);

struct ValueResult {
  std::vector<double> value;
  std::vector<std::size_t> policy;  // greedy, ties to the lowest index
  std::size_t iterations = 0;
};

/// Value iteration until the sup-norm change drops below `tol`. Throws
/// DomainError on a bad kernel or when `max_iterations` is exhausted.
ValueResult value_iteration(const TabularMdp& mdp, double gamma, double tol = 1e-10,
                            std::size_t max_iterations = 1'000'000);

/// Kernel and reward seen under action replacement with probability p:
/// P'(s'|s,a) = (1-p) P(s'|s,a) + p/|A| sum_a' P(s'|s,a'), rows renormalized.
TabularMdp perturbed_kernel(const TabularMdp& mdp, double p);

/// Exact model of a GridMaze at its current slip. Goal and wall cells are
/// terminal; costs are ignored.
TabularMdp grid_maze_mdp(const envs::GridMaze& maze);

}  // namespace rgym::harness
