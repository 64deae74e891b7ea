// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ehsched/errors.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/rate.hpp"
#include "ehsched/scenario.hpp"

namespace ehsched {

/// One scenario's throughput under the three policies of interest. The two
/// baselines sandwich the optimum: on-off from below, the battery- and
/// arrival-oblivious transmitter from above.
struct ComparisonRow {
  std::string id;
  double bits_optimal = 0.0;
  double bits_onoff = 0.0;
  double bits_unconstrained = 0.0;
  double loss_onoff = 0.0;    // fraction of the optimum lost by on-off
  double loss_optimal = 0.0;  // fraction of the upper bound lost by the optimum

  static ComparisonRow make(std::string id, double opt, double onoff,
                            double unc) {
    ComparisonRow row;
    row.id = std::move(id);
    row.bits_optimal = opt;
    row.bits_onoff = onoff;
    row.bits_unconstrained = unc;
    row.loss_onoff = opt > 0.0 ? 1.0 - onoff / opt : 0.0;
    row.loss_optimal = unc > 0.0 ? 1.0 - opt / unc : 0.0;
    return row;
  }
};

/// Greedy baseline: transmit at one fixed level whenever the battery is
/// nonempty, shut off otherwise. The level defaults to the realized average
/// harvest rate (truncated energy before the deadline over the deadline);
/// pass `power_override` to use a level derived from distribution parameters
/// instead. Depletion instants are exact (the level is linear between
/// events) and the battery clips at capacity on arrivals.
inline PowerPolicy on_off_policy(
    const HarvestScenario& scenario, double deadline,
    std::optional<double> power_override = std::nullopt) {
  require_normalized(scenario);
  if (!std::isfinite(deadline) || deadline <= 0.0)
    throw InvalidDeadline("deadline must be positive and finite");

  const double p_on =
      power_override.value_or(scenario.energy_before(deadline) / deadline);
  PowerPolicy policy;
  policy.horizon = deadline;
  auto emit = [&](double until, double power) {
    if (until <= (policy.segments.empty() ? 0.0
                                          : policy.segments.back().until))
      return;
    if (!policy.segments.empty() && policy.segments.back().power == power)
      policy.segments.back().until = until;
    else
      policy.segments.push_back({until, power});
  };

  const double level_tol = 1e-12 * std::max(scenario.total_energy(), 1.0);
  const double time_tol = 1e-12 * deadline;
  double level = 0.0;
  double t = 0.0;
  std::size_t idx = 0;
  while (t < deadline) {
    while (idx < scenario.arrivals.size() && scenario.arrivals[idx].t == t)
      level = std::min(level + scenario.arrivals[idx++].e, scenario.e_max);
    double next_t = deadline;
    if (idx < scenario.arrivals.size() &&
        scenario.arrivals[idx].t < deadline)
      next_t = scenario.arrivals[idx].t;
    if (level > level_tol && p_on > 0.0) {
      const double depletes = t + level / p_on;
      if (depletes < next_t - time_tol) {
        emit(depletes, p_on);
        emit(next_t, 0.0);
        level = 0.0;
      } else {
        emit(next_t, p_on);
        level = std::max(level - (next_t - t) * p_on, 0.0);
      }
    } else {
      emit(next_t, 0.0);
    }
    t = next_t;
  }
  return policy;
}

/// Throughput of a transmitter with no battery or arrival constraints: all
/// energy harvested before the deadline is available up front and spread
/// uniformly. Uses the raw, untruncated energies, since that transmitter
/// has no capacity to truncate against.
inline double unconstrained_bound(const HarvestScenario& raw_scenario,
                                  double deadline, const RateFunction& rate) {
  if (!std::isfinite(deadline) || deadline <= 0.0)
    throw InvalidDeadline("deadline must be positive and finite");
  for (const Arrival& a : raw_scenario.arrivals)
    if (!std::isfinite(a.t) || !std::isfinite(a.e) || a.e < 0.0 || a.t < 0.0)
      throw InvalidScenario("invalid arrival in raw scenario");
  const double energy = raw_scenario.energy_before(deadline);
  return deadline * rate(energy / deadline);
}

}  // namespace ehsched
