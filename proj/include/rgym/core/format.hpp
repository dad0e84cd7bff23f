#pragma once

#include <string>
#include <string_view>

namespace rgym {

// Shortest round-trip decimal text of a double ("0.1", "-16", "1e-07").
std::string format_real(double x);

// Strict parse of a whole token as a double; throws DomainError.
double parse_real(std::string_view text);

}  // namespace rgym
