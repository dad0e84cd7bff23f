#pragma once

#include <vector>

namespace rgym::harness {

struct ReturnStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one value
  double min = 0.0;
  double cvar = 0.0;
  double ci95 = 0.0;  // 1.96 * std / sqrt(n)
};

// Mean of the ceil(alpha * K) lowest returns. Throws DomainError on an empty
// list or alpha outside (0, 1].
double cvar(std::vector<double> returns, double alpha);

ReturnStats compute_metrics(const std::vector<double>& returns, double alpha);

}  // namespace rgym::harness
