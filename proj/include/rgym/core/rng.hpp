#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace rgym {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to turn split tags into 64-bit words.
constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based random stream: the i-th draw is a pure function of
/// (key, i). Copying a stream copies its position; `split` derives an
/// independent child stream without advancing the parent.
///
/// All samplers are implemented here rather than through <random>
/// distributions so that draws are identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() = default;
  explicit Rng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi) noexcept {
    const double u = uniform();
    const double x = lo + (hi - lo) * u;
    return x > hi ? hi : x;
  }

  // Unbiased integer in [0, n). Requires n >= 1.
  std::uint64_t index(std::uint64_t n) noexcept;

  bool bernoulli(double q) noexcept { return uniform() < q; }

  // Box-Muller, one normal per two uniforms (no cached second value).
  double normal(double mu, double sigma) noexcept;

  Rng split(std::uint64_t tag) const noexcept {
    return Rng(mix64(key_ ^ mix64(tag + 0x632be59bd9b4e019ULL)));
  }
  Rng split(std::string_view tag) const noexcept { return split(hash_tag(tag)); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

  bool operator==(const Rng&) const = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace rgym
