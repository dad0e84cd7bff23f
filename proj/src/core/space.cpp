#include "rgym/core/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgym/core/errors.hpp"

namespace rgym {

std::size_t Value::size() const noexcept {
  if (is_index()) return 1;
  if (is_vector()) return as_vector().size();
  return as_indices().size();
}

Vector Value::to_reals() const {
  if (is_index()) return {static_cast<double>(as_index())};
  if (is_vector()) return as_vector();
  const auto& idx = as_indices();
  return Vector(idx.begin(), idx.end());
}

std::string Value::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (is_index()) {
    os << as_index();
    return os.str();
  }
  os << '[';
  const Vector reals = to_reals();
  for (std::size_t i = 0; i < reals.size(); ++i) {
    if (i) os << ", ";
    os << reals[i];
  }
  os << ']';
  return os.str();
}

SpaceSpec SpaceSpec::discrete(std::size_t n) {
  if (n < 1) throw DomainError("discrete space needs n >= 1");
  SpaceSpec s;
  s.kind_ = Kind::Discrete;
  s.n_ = n;
  return s;
}

SpaceSpec SpaceSpec::box(Vector low, Vector high) {
  if (low.size() != high.size() || low.empty())
    throw DomainError("box bounds must be non-empty and of equal length");
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!(low[i] <= high[i])) throw DomainError("box bound low > high at index " + std::to_string(i));
  }
  SpaceSpec s;
  s.kind_ = Kind::Box;
  s.low_ = std::move(low);
  s.high_ = std::move(high);
  return s;
}

SpaceSpec SpaceSpec::multi_discrete(IndexVector counts) {
  if (counts.empty() || std::ranges::any_of(counts, [](std::size_t c) { return c < 1; }))
    throw DomainError("multi-discrete space needs every count >= 1");
  SpaceSpec s;
  s.kind_ = Kind::MultiDiscrete;
  s.counts_ = std::move(counts);
  return s;
}

std::size_t SpaceSpec::dimension() const noexcept {
  switch (kind_) {
    case Kind::Discrete: return 1;
    case Kind::Box: return low_.size();
    case Kind::MultiDiscrete: return counts_.size();
  }
  return 0;
}

bool SpaceSpec::contains(const Value& v) const noexcept {
  switch (kind_) {
    case Kind::Discrete:
      return v.is_index() && v.as_index() < n_;
    case Kind::Box: {
      if (!v.is_vector() || v.as_vector().size() != low_.size()) return false;
      const auto& x = v.as_vector();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || x[i] < low_[i] || x[i] > high_[i]) return false;
      }
      return true;
    }
    case Kind::MultiDiscrete: {
      if (!v.is_indices() || v.as_indices().size() != counts_.size()) return false;
      const auto& x = v.as_indices();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= counts_[i]) return false;
      }
      return true;
    }
  }
  return false;
}

bool SpaceSpec::clip(Value& v) const {
  if (kind_ != Kind::Box) return false;
  bool moved = false;
  auto& x = v.as_vector();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = std::clamp(x[i], low_[i], high_[i]);
    if (c != x[i]) {
      x[i] = c;
      moved = true;
    }
  }
  return moved;
}

std::string SpaceSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Discrete:
      os << "discrete(" << n_ << ")";
      break;
    case Kind::Box:
      os << "box(" << low_.size() << ")";
      break;
    case Kind::MultiDiscrete:
      os << "multi_discrete(";
      for (std::size_t i = 0; i < counts_.size(); ++i) os << (i ? "," : "") << counts_[i];
      os << ")";
      break;
  }
  return os.str();
}

}  // namespace rgym
