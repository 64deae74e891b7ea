// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ehsched/battery.hpp"
#include "ehsched/errors.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/rate.hpp"
#include "ehsched/scenario.hpp"
#include "ehsched/solver.hpp"

namespace ehsched {

/// Result of the brute-force grid search against the solver. The gap may be
/// negative only up to the grid resolution error: a grid schedule can never
/// genuinely beat the optimum.
struct OracleReport {
  double best_bits = 0.0;
  PowerPolicy best_policy;
  double solver_bits = 0.0;
  double gap = 0.0;          // solver_bits - best_bits
  double grid_step = 0.0;
  double error_bound = 0.0;  // grid resolution error bound
  bool pass = false;
};

namespace detail {

inline double u01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Copy of `policy` with `dp` added on the window (from, to]. Splits
/// segments at the window edges; merges runs that end up with equal power.
inline PowerPolicy add_power_rect(const PowerPolicy& policy, double from,
                                  double to, double dp) {
  PowerPolicy out;
  out.horizon = policy.horizon;
  double prev = 0.0;
  auto emit = [&](double until, double power) {
    if (until <= prev) return;
    if (!out.segments.empty() && out.segments.back().power == power)
      out.segments.back().until = until;
    else
      out.segments.push_back({until, power});
    prev = until;
  };
  for (const PowerSegment& seg : policy.segments) {
    const double hi = seg.until;
    emit(std::clamp(from, prev, hi), seg.power);
    emit(std::clamp(to, prev, hi), seg.power + dp);
    emit(hi, seg.power);
  }
  return out;
}

}  // namespace detail

/// Exhaustive search over per-epoch constant powers on the grid
/// {0, step, 2*step, ...} up to `power_cap` (default: total energy over the
/// shortest epoch, the most any feasible constant run could need). Between
/// arrivals the optimal power is constant, so per-epoch vectors cover the
/// search space; the battery recursion bounds each epoch's grid range, which
/// skips only vectors that are infeasible outright. Desk scale only.
inline OracleReport brute_force_max_throughput(const HarvestScenario& scenario,
                                               double deadline,
                                               const RateFunction& rate,
                                               double grid_step,
                                               double power_cap = 0.0) {
  require_normalized(scenario);
  if (!std::isfinite(deadline) || deadline <= 0.0)
    throw InvalidDeadline("deadline must be positive and finite");
  if (!(grid_step > 0.0)) throw Error("grid step must be positive");

  std::vector<double> edges{0.0};
  for (std::size_t i = 1; i < scenario.arrivals.size(); ++i)
    if (scenario.arrivals[i].t < deadline)
      edges.push_back(scenario.arrivals[i].t);
  edges.push_back(deadline);
  const std::size_t n_epochs = edges.size() - 1;
  if (n_epochs > 5)
    throw OracleTooExpensive("brute force limited to 5 epochs, got " +
                             std::to_string(n_epochs));

  std::vector<double> epoch_len(n_epochs);
  double shortest = edges[1] - edges[0];
  for (std::size_t j = 0; j < n_epochs; ++j) {
    epoch_len[j] = edges[j + 1] - edges[j];
    shortest = std::min(shortest, epoch_len[j]);
  }
  // energy landing exactly at the right edge of each epoch (the deadline
  // edge included: such an arrival still raises the level and can overflow)
  std::vector<double> energy_at_end(n_epochs, 0.0);
  for (std::size_t i = 1; i < scenario.arrivals.size(); ++i) {
    const double t = scenario.arrivals[i].t;
    if (t > deadline) break;
    for (std::size_t j = 0; j < n_epochs; ++j)
      if (edges[j + 1] == t) energy_at_end[j] = scenario.arrivals[i].e;
  }

  const double total = scenario.total_energy();
  const double cap = power_cap > 0.0 ? power_cap : total / shortest;
  const long cap_idx = static_cast<long>(std::floor(cap / grid_step + 1e-9));
  const double slack = 1e-9 * total;
  const double e_max = scenario.e_max;

  OracleReport report;
  report.grid_step = grid_step;
  bool found = false;
  std::vector<long> choice(n_epochs, 0);
  std::vector<long> best_choice;

  auto search = [&](auto&& self, std::size_t j, double level,
                    double bits) -> void {
    if (j == n_epochs) {
      if (!found || bits > report.best_bits) {
        found = true;
        report.best_bits = bits;
        best_choice = choice;
      }
      return;
    }
    const double len = epoch_len[j];
    long i_hi = static_cast<long>(
        std::floor((std::max(level, 0.0) + slack) / (len * grid_step)));
    i_hi = std::min(i_hi, cap_idx);
    const double wall = level + energy_at_end[j] - e_max - slack;
    long i_lo = wall <= 0.0
                    ? 0
                    : static_cast<long>(std::ceil(wall / (len * grid_step)));
    if (i_lo > i_hi) return;
    if (j + 1 == n_epochs) {
      // no later constraints: the largest feasible power departs the most
      const double p = static_cast<double>(i_hi) * grid_step;
      choice[j] = i_hi;
      self(self, j + 1, level - p * len + energy_at_end[j],
           bits + len * rate(p));
      return;
    }
    for (long i = i_lo; i <= i_hi; ++i) {
      const double p = static_cast<double>(i) * grid_step;
      choice[j] = i;
      self(self, j + 1, level - p * len + energy_at_end[j],
           bits + len * rate(p));
    }
  };
  search(search, 0, scenario.arrivals[0].e, 0.0);

  if (found) {
    report.best_policy.horizon = deadline;
    for (std::size_t j = 0; j < n_epochs; ++j)
      report.best_policy.segments.push_back(
          {edges[j + 1], static_cast<double>(best_choice[j]) * grid_step});
    if (!is_feasible(scenario, report.best_policy).ok)
      throw AlgorithmInvariantViolated(
          "oracle best vector rejected by the feasibility check");
  }

  report.solver_bits =
      throughput(solve_max_throughput(scenario, deadline), rate);
  report.gap = report.solver_bits - report.best_bits;
  // steepest slope of a concave rate on [0, cap] sits at 0
  report.error_bound = deadline * rate.derivative_at_zero * grid_step;
  report.pass = !found ||
                report.solver_bits >= report.best_bits - report.error_bound;
  return report;
}

struct PerturbationOutcome {
  bool pass = true;
  // counterexample details when !pass
  double raise_at = 0.0;
  double lower_at = 0.0;
  double width = 0.0;
  double gain = 0.0;
};

/// Randomized energy-displacement test: moves delta * width of energy
/// between two disjoint windows of the schedule, keeps only displacements
/// that stay strictly feasible, and flags any that raise the throughput.
/// No feasible displacement can improve an optimal schedule.
inline PerturbationOutcome perturbation_check(const HarvestScenario& scenario,
                                              const PowerPolicy& policy,
                                              const RateFunction& rate,
                                              double delta, int trials,
                                              std::uint64_t seed = 0x7e57ed) {
  PerturbationOutcome outcome;
  const double end = policy.end_time();
  if (end <= 0.0 || delta <= 0.0) return outcome;

  const double base_bits = throughput(policy, rate);
  const double gain_tol = 1e-10 * std::max(1.0, base_bits);
  const double w_min = end / 1000.0;
  const double w_max = end / 20.0;
  std::mt19937_64 eng(seed);

  for (int trial = 0; trial < trials; ++trial) {
    const double w = w_min + detail::u01(eng) * (w_max - w_min);
    const double raise_at = detail::u01(eng) * (end - w);
    const double lower_at = detail::u01(eng) * (end - w);
    if (std::abs(raise_at - lower_at) < w) continue;  // windows overlap

    PowerPolicy perturbed =
        detail::add_power_rect(policy, raise_at, raise_at + w, delta);
    perturbed =
        detail::add_power_rect(perturbed, lower_at, lower_at + w, -delta);
    bool negative = false;
    for (const PowerSegment& s : perturbed.segments)
      if (s.power < 0.0) negative = true;
    if (negative) continue;
    if (!is_feasible(scenario, perturbed).ok) continue;

    const double gain = throughput(perturbed, rate) - base_bits;
    if (gain > gain_tol) {
      outcome.pass = false;
      outcome.raise_at = raise_at;
      outcome.lower_at = lower_at;
      outcome.width = w;
      outcome.gain = gain;
      return outcome;
    }
  }
  return outcome;
}

struct RoundTripReport {
  bool pass = true;
  double deadline = 0.0;
  double bits = 0.0;
  double recovered_time = 0.0;
  double time_deviation = 0.0;  // relative
  double max_segment_deviation = 0.0;
  bool segments_match = true;
};

/// Composes the two solvers: the bits departed by the deadline-T schedule,
/// fed to the minimum-time solver, must complete at T again with the same
/// segments.
inline RoundTripReport roundtrip_check(const HarvestScenario& scenario,
                                       double deadline,
                                       const RateFunction& rate, double tol) {
  RoundTripReport rep;
  rep.deadline = deadline;
  const PowerPolicy policy = solve_max_throughput(scenario, deadline);
  rep.bits = throughput(policy, rate);
  if (rep.bits <= 0.0) return rep;  // nothing to transmit either way

  const MinTimeResult mt = solve_min_time(scenario, rep.bits, rate);
  rep.recovered_time = mt.completion_time;
  rep.time_deviation = std::abs(mt.completion_time - deadline) / deadline;

  if (mt.policy.segments.size() != policy.segments.size()) {
    rep.segments_match = false;
  } else {
    const double t_scale = std::max(1.0, deadline);
    for (std::size_t i = 0; i < policy.segments.size(); ++i) {
      const double du =
          std::abs(policy.segments[i].until - mt.policy.segments[i].until) /
          t_scale;
      const double dp =
          std::abs(policy.segments[i].power - mt.policy.segments[i].power) /
          std::max(1.0, policy.segments[i].power);
      rep.max_segment_deviation =
          std::max({rep.max_segment_deviation, du, dp});
    }
    rep.segments_match = rep.max_segment_deviation <= tol;
  }
  rep.pass = rep.time_deviation <= tol && rep.segments_match;
  return rep;
}

}  // namespace ehsched
