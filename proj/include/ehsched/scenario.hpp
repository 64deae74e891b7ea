// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ehsched/errors.hpp"

namespace ehsched {

struct Arrival {
  double t = 0.0;  // harvest instant
  double e = 0.0;  // harvested energy
};

/// A harvesting problem instance: battery capacity plus the arrival sequence.
/// Raw instances may be unsorted, carry duplicates, or exceed the battery;
/// normalize_scenario produces the canonical form the solvers expect:
/// arrivals strictly increasing in time, first one at t = 0, every energy
/// in (0, e_max] (the t = 0 slot may hold 0).
struct HarvestScenario {
  double e_max = 0.0;
  std::vector<Arrival> arrivals;
  bool normalized = false;

  double total_energy() const {
    double sum = 0.0;
    for (const Arrival& a : arrivals) sum += a.e;
    return sum;
  }

  /// Energy harvested strictly before time t.
  double energy_before(double t) const {
    double sum = 0.0;
    for (const Arrival& a : arrivals)
      if (a.t < t) sum += a.e;
    return sum;
  }
};

inline void require_normalized(const HarvestScenario& s) {
  if (!s.normalized)
    throw InvalidScenario("scenario must be normalized first");
}

/// Canonicalizes a raw scenario: sorts arrivals, merges simultaneous ones by
/// summing energies, truncates each merged energy at e_max (a battery can
/// never absorb more than its capacity from one packet), drops zero-energy
/// arrivals, and guarantees an entry at t = 0 (absent one, the battery
/// simply starts empty). Idempotent.
inline HarvestScenario normalize_scenario(const HarvestScenario& raw) {
  if (!std::isfinite(raw.e_max) || raw.e_max <= 0.0)
    throw InvalidScenario("e_max must be positive and finite");
  for (const Arrival& a : raw.arrivals) {
    if (!std::isfinite(a.t) || !std::isfinite(a.e))
      throw InvalidScenario("arrival with non-finite time or energy");
    if (a.t < 0.0) throw InvalidScenario("arrival with negative time");
    if (a.e < 0.0) throw InvalidScenario("arrival with negative energy");
  }

  std::vector<Arrival> sorted = raw.arrivals;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Arrival& a, const Arrival& b) { return a.t < b.t; });

  HarvestScenario out;
  out.e_max = raw.e_max;
  out.normalized = true;
  for (const Arrival& a : sorted) {
    if (!out.arrivals.empty() && out.arrivals.back().t == a.t)
      out.arrivals.back().e += a.e;  // merge before truncating
    else
      out.arrivals.push_back(a);
  }
  std::vector<Arrival> kept;
  kept.reserve(out.arrivals.size());
  for (Arrival& a : out.arrivals) {
    a.e = std::min(a.e, out.e_max);
    if (a.e > 0.0 || a.t == 0.0) kept.push_back(a);
  }
  if (kept.empty() || kept.front().t != 0.0)
    kept.insert(kept.begin(), Arrival{0.0, 0.0});
  out.arrivals = std::move(kept);
  return out;
}

}  // namespace ehsched
