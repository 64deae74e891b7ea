// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ehsched/errors.hpp"
#include "ehsched/rate.hpp"

namespace ehsched {

/// One run of constant transmit power. Segment k is active on
/// (previous until, until], with the first segment starting at 0.
struct PowerSegment {
  double until = 0.0;
  double power = 0.0;
};

/// Piecewise-constant transmit schedule on [0, horizon]. Power is 0 after
/// the last segment end.
struct PowerPolicy {
  std::vector<PowerSegment> segments;  // strictly increasing `until`
  double horizon = 0.0;

  bool empty() const { return segments.empty(); }

  double end_time() const {
    return segments.empty() ? 0.0 : segments.back().until;
  }

  double power_at(double t) const {
    auto it = std::lower_bound(
        segments.begin(), segments.end(), t,
        [](const PowerSegment& s, double v) { return s.until < v; });
    return it == segments.end() ? 0.0 : it->power;
  }

  /// Energy spent on [0, t].
  double spend_by(double t) const {
    double spent = 0.0;
    double prev = 0.0;
    for (const PowerSegment& s : segments) {
      if (t <= prev) break;
      spent += (std::min(t, s.until) - prev) * s.power;
      prev = s.until;
    }
    return spent;
  }
};

inline void validate_policy(const PowerPolicy& p) {
  if (!std::isfinite(p.horizon) || p.horizon < 0.0)
    throw Error("policy horizon must be finite and nonnegative");
  double prev = 0.0;
  for (const PowerSegment& s : p.segments) {
    if (!std::isfinite(s.until) || !std::isfinite(s.power))
      throw Error("policy segment with non-finite value");
    if (s.until <= prev) throw Error("policy breakpoints must strictly increase");
    if (s.power < 0.0) throw Error("policy power must be nonnegative");
    prev = s.until;
  }
  if (prev > p.horizon * (1.0 + 1e-12) + 1e-300)
    throw Error("policy extends past its horizon");
}

/// Total bits departed by the schedule. Exact for piecewise-constant power.
inline double throughput(const PowerPolicy& policy, const RateFunction& rate) {
  double bits = 0.0;
  double prev = 0.0;
  for (const PowerSegment& s : policy.segments) {
    bits += (s.until - prev) * rate(s.power);
    prev = s.until;
  }
  return bits;
}

}  // namespace ehsched
