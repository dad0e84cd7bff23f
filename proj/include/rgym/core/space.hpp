#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace rgym {

using Vector = std::vector<double>;
using IndexVector = std::vector<std::size_t>;

/// A state or action: a discrete index, a real vector, or one discrete index
/// per agent (multi-agent environments).
class Value {
 public:
  Value() = default;

  static Value index(std::size_t i) { return Value(Data{i}); }
  static Value vector(Vector v) { return Value(Data{std::move(v)}); }
  static Value indices(IndexVector v) { return Value(Data{std::move(v)}); }

  bool is_index() const noexcept { return std::holds_alternative<std::size_t>(data_); }
  bool is_vector() const noexcept { return std::holds_alternative<Vector>(data_); }
  bool is_indices() const noexcept { return std::holds_alternative<IndexVector>(data_); }

  std::size_t as_index() const { return std::get<std::size_t>(data_); }
  const Vector& as_vector() const { return std::get<Vector>(data_); }
  Vector& as_vector() { return std::get<Vector>(data_); }
  const IndexVector& as_indices() const { return std::get<IndexVector>(data_); }
  IndexVector& as_indices() { return std::get<IndexVector>(data_); }

  // Number of scalar components.
  std::size_t size() const noexcept;

  // Components widened to reals (indices become exact doubles).
  Vector to_reals() const;

  std::string to_string() const;

  bool operator==(const Value&) const = default;

 private:
  using Data = std::variant<std::size_t, Vector, IndexVector>;
  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_{std::size_t{0}};
};

using StateValue = Value;
using ActionValue = Value;

/// State or action space.
class SpaceSpec {
 public:
  enum class Kind { Discrete, Box, MultiDiscrete };

  SpaceSpec() = default;

  static SpaceSpec discrete(std::size_t n);
  static SpaceSpec box(Vector low, Vector high);
  static SpaceSpec multi_discrete(IndexVector counts);

  Kind kind() const noexcept { return kind_; }
  bool is_discrete() const noexcept { return kind_ == Kind::Discrete; }
  bool is_box() const noexcept { return kind_ == Kind::Box; }
  bool is_multi_discrete() const noexcept { return kind_ == Kind::MultiDiscrete; }
  // True for both discrete kinds.
  bool is_finite() const noexcept { return kind_ != Kind::Box; }

  std::size_t n() const noexcept { return n_; }
  const Vector& low() const noexcept { return low_; }
  const Vector& high() const noexcept { return high_; }
  const IndexVector& counts() const noexcept { return counts_; }

  // Number of scalar components of a member value.
  std::size_t dimension() const noexcept;

  bool contains(const Value& v) const noexcept;

  // Clips a box value into [low, high]; returns true if anything moved.
  bool clip(Value& v) const;

  std::string describe() const;

  bool operator==(const SpaceSpec&) const = default;

 private:
  Kind kind_ = Kind::Discrete;
  std::size_t n_ = 1;
  Vector low_, high_;
  IndexVector counts_;
};

}  // namespace rgym
