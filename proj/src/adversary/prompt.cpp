#include "rgym/adversary/prompt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>

namespace rgym::adversary {

namespace {

constexpr std::string_view kPreamble =
    "This is about a robust reinforcement learning setting; we want you as an adversary policy. "
    "If the current reward exceeds the previous reward value, please input some observation noise "
    "to disturb the environment and improve the learning algorithm's robustness.";

std::string python_int_repr(double x) { return std::to_string(static_cast<long long>(std::llround(x))); }

std::string python_list(const Vector& v, bool integral) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += integral ? python_int_repr(v[i]) : python_float_repr(v[i]);
  }
  return out + "]";
}

bool all_equal(const Vector& v) {
  return std::ranges::adjacent_find(v, std::ranges::not_equal_to{}) == v.end();
}

}  // namespace

std::string python_float_repr(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";

  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific);
  const std::string_view sci(buf, static_cast<std::size_t>(res.ptr - buf));
  // sci = [-]d[.ddd]e(+|-)XX
  const auto e_pos = sci.find('e');
  std::string_view mantissa = sci.substr(0, e_pos);
  const int exponent = std::atoi(std::string(sci.substr(e_pos + 1)).c_str());
  const bool negative = mantissa.front() == '-';
  if (negative) mantissa.remove_prefix(1);
  std::string digits;
  for (char c : mantissa) {
    if (c != '.') digits += c;
  }

  std::string out = negative ? "-" : "";
  if (exponent >= -4 && exponent < 16) {
    const int point = exponent + 1;  // digits before the decimal point
    if (point <= 0) {
      out += "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
    } else if (static_cast<std::size_t>(point) >= digits.size()) {
      out += digits + std::string(static_cast<std::size_t>(point) - digits.size(), '0') + ".0";
    } else {
      out += digits.substr(0, static_cast<std::size_t>(point)) + "." +
             digits.substr(static_cast<std::size_t>(point));
    }
    return out;
  }
  out += digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  const int mag = std::abs(exponent);
  out += exponent < 0 ? "e-" : "e+";
  if (mag < 10) out += '0';
  out += std::to_string(mag);
  return out;
}

std::string build_llm_prompt(const AdversaryRequest& req) {
  std::string region;
  if (!req.region_low.empty() && all_equal(req.region_low) && all_equal(req.region_high)) {
    region = "(" + python_float_repr(req.region_low.front()) + ", " +
             python_float_repr(req.region_high.front()) + ")";
  } else {
    region = "(" + python_list(req.region_low, false) + ", " + python_list(req.region_high, false) + ")";
  }
  const std::string state = (req.integral && req.value.size() == 1)
                                ? python_int_repr(req.value.front())
                                : python_list(req.value, req.integral);

  std::string prompt(kPreamble);
  prompt += "The noise should be in this area:" + region;
  prompt += ", the current reward:" + python_float_repr(req.current_reward);
  prompt += ", the previous reward is" + python_float_repr(req.previous_reward);
  prompt += "please slightly revise the current environment state values:" + state;
  prompt += ", just output the revised state with its original format";
  prompt += "do not output any other things.";
  return prompt;
}

}  // namespace rgym::adversary
