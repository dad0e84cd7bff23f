#pragma once

#include <string>

#include "rgym/adversary/adversary.hpp"

namespace rgym::adversary {

// Python's repr() of a float: shortest round-trip digits, fixed notation for
// decimal exponents in [-4, 16), otherwise "1.5e+16" style.
std::string python_float_repr(double x);

/// Renders the LLM adversary prompt for a request. The region is shown as a
/// (low, high) tuple of scalars when every element shares the same bounds,
/// otherwise as a tuple of lists; the state is shown as a Python list
/// (or a bare int for a single discrete index). Pure.
std::string build_llm_prompt(const AdversaryRequest& req);

}  // namespace rgym::adversary
