#include "rgym/core/format.hpp"

#include <charconv>

#include "rgym/core/errors.hpp"

namespace rgym {

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) throw DomainError("not a number: '" + std::string(text) + "'");
  return x;
}

}  // namespace rgym
