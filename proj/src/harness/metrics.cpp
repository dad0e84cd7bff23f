#include "rgym/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rgym/core/errors.hpp"

namespace rgym::harness {

double cvar(std::vector<double> returns, double alpha) {
  if (returns.empty()) throw DomainError("cvar of an empty return list");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("cvar alpha must lie in (0, 1]");
  const std::size_t k = returns.size();
  const auto n = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(k) - 1e-9)), 1, k);
  std::sort(returns.begin(), returns.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += returns[i];
  return sum / static_cast<double>(n);
}

ReturnStats compute_metrics(const std::vector<double>& returns, double alpha) {
  ReturnStats st;
  st.cvar = cvar(returns, alpha);
  const double n = static_cast<double>(returns.size());
  double sum = 0.0;
  for (double r : returns) sum += r;
  st.mean = sum / n;
  st.min = *std::min_element(returns.begin(), returns.end());
  if (returns.size() > 1) {
    double ss = 0.0;
    for (double r : returns) ss += (r - st.mean) * (r - st.mean);
    st.std = std::sqrt(ss / (n - 1.0));
  }
  st.ci95 = 1.96 * st.std / std::sqrt(n);
  // Summation rounding can leave the mean a hair below the cvar of a
  // constant list; keep the documented ordering exact.
  st.cvar = std::clamp(st.cvar, st.min, std::max(st.min, st.mean));
  return st;
}

}  // namespace rgym::harness
