// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ehsched/errors.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/scenario.hpp"

namespace ehsched {

enum class BatteryMode { strict, clipping };

/// Battery state at one event instant (an arrival or a policy breakpoint).
/// `level_before` is the level after draining up to t but before any arrival
/// at t; `level_after` includes the arrival. In clipping mode the level is
/// capped at e_max and `overflow_lost` is the energy discarded; in strict
/// mode nothing is capped and `overflow_lost` annotates the excess above
/// e_max, if any.
struct BatteryEvent {
  double t = 0.0;
  double level_before = 0.0;
  double level_after = 0.0;
  double overflow_lost = 0.0;
};

struct BatteryTrajectory {
  BatteryMode mode = BatteryMode::strict;
  std::vector<BatteryEvent> events;
  double total_overflow_lost = 0.0;  // meaningful in clipping mode

  const BatteryEvent* at(double t) const {
    for (const BatteryEvent& e : events)
      if (e.t == t) return &e;
    return nullptr;
  }
};

/// Battery level at every arrival instant and policy breakpoint up to the
/// policy horizon. Between events the level is affine (constant drain, no
/// harvest), so event-point evaluation captures all extrema. Arrivals after
/// the horizon are outside the transmission window and are ignored.
inline BatteryTrajectory battery_trajectory(const HarvestScenario& scenario,
                                            const PowerPolicy& policy,
                                            BatteryMode mode) {
  require_normalized(scenario);

  std::vector<double> times;
  times.reserve(scenario.arrivals.size() + policy.segments.size() + 2);
  for (const Arrival& a : scenario.arrivals)
    if (a.t <= policy.horizon) times.push_back(a.t);
  for (const PowerSegment& s : policy.segments) times.push_back(s.until);
  times.push_back(0.0);
  times.push_back(policy.horizon);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  BatteryTrajectory traj;
  traj.mode = mode;
  traj.events.reserve(times.size());

  double level = 0.0;
  double prev = 0.0;
  std::size_t next_arrival = 0;
  for (double t : times) {
    if (t > prev) level -= (t - prev) * policy.power_at(t);
    BatteryEvent ev;
    ev.t = t;
    ev.level_before = level;
    double harvested = 0.0;
    while (next_arrival < scenario.arrivals.size() &&
           scenario.arrivals[next_arrival].t == t)
      harvested += scenario.arrivals[next_arrival++].e;
    level += harvested;
    double excess = level - scenario.e_max;
    if (excess > 0.0) {
      ev.overflow_lost = excess;
      if (mode == BatteryMode::clipping) {
        level = scenario.e_max;
        traj.total_overflow_lost += excess;
      }
    }
    ev.level_after = level;
    traj.events.push_back(ev);
    prev = t;
  }
  return traj;
}

enum class ViolationKind { deficit, overflow };

struct Violation {
  ViolationKind kind = ViolationKind::deficit;
  double time = 0.0;
  double magnitude = 0.0;
};

struct FeasibilityReport {
  bool ok = true;
  std::optional<Violation> first;
};

/// Checks that the battery level stays within [0, e_max] at every event
/// point under strict semantics, up to a relative tolerance scaled by the
/// total harvested energy. Deficit is reported before overflow when both
/// occur at one instant.
inline FeasibilityReport is_feasible(const HarvestScenario& scenario,
                                     const PowerPolicy& policy,
                                     double rel_tol = 1e-9) {
  BatteryTrajectory traj =
      battery_trajectory(scenario, policy, BatteryMode::strict);
  const double slack = rel_tol * scenario.total_energy();
  FeasibilityReport report;
  for (const BatteryEvent& ev : traj.events) {
    if (ev.level_before < -slack) {
      report.ok = false;
      report.first = Violation{ViolationKind::deficit, ev.t, -ev.level_before};
      return report;
    }
    if (ev.level_after > scenario.e_max + slack) {
      report.ok = false;
      report.first = Violation{ViolationKind::overflow, ev.t,
                               ev.level_after - scenario.e_max};
      return report;
    }
  }
  return report;
}

}  // namespace ehsched
