// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "ehsched/errors.hpp"

namespace ehsched {

/// Power-rate map r(p) in bits per unit time: r(0) = 0, strictly increasing,
/// strictly concave. `derivative_at_zero` is the slope r'(0); it bounds the
/// bits deliverable per unit of energy (sup of s*r(A/s) over s is r'(0)*A).
struct RateFunction {
  std::string name;
  std::function<double(double)> eval;
  double derivative_at_zero = 0.0;

  double operator()(double power) const { return eval(power); }
};

/// r(p) = 1/2 log2(1 + p), the rate of a unit-bandwidth AWGN channel.
inline RateFunction awgn_rate() {
  return {"awgn", [](double p) { return 0.5 * std::log2(1.0 + p); },
          0.5 / std::numbers::ln2};
}

/// r(p) = sqrt(1 + p) - 1. A second valid rate, used mostly to check that
/// schedule shapes do not depend on the rate function.
inline RateFunction sqrt_rate() {
  return {"sqrt", [](double p) { return std::sqrt(1.0 + p) - 1.0; }, 0.5};
}

inline RateFunction rate_by_name(const std::string& name) {
  if (name == "awgn") return awgn_rate();
  if (name == "sqrt") return sqrt_rate();
  throw Error("unknown rate function: " + name);
}

}  // namespace ehsched
