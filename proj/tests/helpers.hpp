// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ehsched/ehsched.hpp"

namespace ehtest {

// E_max = 10, E = {2,1,6,4,8,1} at s = {0,2,4,5,7,11}; the worked scenario
// used across the suite.
inline ehsched::HarvestScenario sample_scenario() {
  ehsched::HarvestScenario raw;
  raw.e_max = 10.0;
  raw.arrivals = {{0, 2}, {2, 1}, {4, 6}, {5, 4}, {7, 8}, {11, 1}};
  return ehsched::normalize_scenario(raw);
}

// Optimal deadline-12 schedule for the scenario above.
inline ehsched::PowerPolicy sample_policy() {
  ehsched::PowerPolicy p;
  p.horizon = 12.0;
  p.segments = {{4.0, 0.75}, {7.0, 8.0 / 3.0}, {12.0, 2.2}};
  return p;
}

// Battery level at time t computed directly from cumulative sums, not via
// battery_trajectory; used to cross-check event-point evaluation.
// `include_at` adds arrivals landing exactly at t.
inline double level_direct(const ehsched::HarvestScenario& sc,
                           const ehsched::PowerPolicy& policy, double t,
                           bool include_at = true) {
  double harvested = 0.0;
  for (const ehsched::Arrival& a : sc.arrivals)
    if (a.t < t || (include_at && a.t == t)) harvested += a.e;
  double spent = 0.0;
  double prev = 0.0;
  for (const ehsched::PowerSegment& s : policy.segments) {
    if (t <= prev) break;
    spent += (std::min(t, s.until) - prev) * s.power;
    prev = s.until;
  }
  return harvested - spent;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double u01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + u01() * (hi - lo); }
  int index(int n) { return static_cast<int>(eng() % static_cast<std::uint64_t>(n)); }
};

// Forward-simulated feasible schedule: each epoch's power is drawn between
// the overflow floor and the causality ceiling, so the result respects the
// battery by construction.
inline ehsched::PowerPolicy random_feasible_policy(
    const ehsched::HarvestScenario& sc, double deadline, Rng& rng) {
  ehsched::PowerPolicy policy;
  policy.horizon = deadline;
  double level = 0.0;
  double prev = 0.0;
  std::size_t idx = 0;
  while (prev < deadline) {
    while (idx < sc.arrivals.size() && sc.arrivals[idx].t == prev)
      level = std::min(level + sc.arrivals[idx++].e, sc.e_max);
    double next = deadline;
    if (idx < sc.arrivals.size() && sc.arrivals[idx].t < deadline)
      next = sc.arrivals[idx].t;
    const double len = next - prev;
    const double e_next =
        (idx < sc.arrivals.size() && sc.arrivals[idx].t == next)
            ? sc.arrivals[idx].e
            : 0.0;
    const double floor = std::max(0.0, (level + e_next - sc.e_max) / len);
    const double ceil = level / len;
    const double p = floor + rng.u01() * std::max(0.0, ceil - floor);
    policy.segments.push_back({next, p});
    level -= p * len;
    prev = next;
  }
  return policy;
}

inline ehsched::HarvestScenario random_scenario(Rng& rng, double e_max = 10.0,
                                                int max_arrivals = 8,
                                                double max_gap = 4.0) {
  ehsched::HarvestScenario raw;
  raw.e_max = e_max;
  double t = 0.0;
  const int n = 1 + rng.index(max_arrivals);
  for (int i = 0; i < n; ++i) {
    raw.arrivals.push_back({t, rng.uniform(0.0, e_max)});
    t += rng.uniform(0.2, max_gap);
  }
  return ehsched::normalize_scenario(raw);
}

}  // namespace ehtest
