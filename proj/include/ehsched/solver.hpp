// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ehsched/errors.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/rate.hpp"
#include "ehsched/scenario.hpp"

namespace ehsched {

/// Range of constant power levels that keep a prefix run [0, s] boundary-
/// feasible at one arrival, ignoring all other arrivals: running at p_hi
/// empties the battery just before s, running at p_lo leaves it exactly full
/// just after s. p_lo may be negative; the bounds only serve comparison.
/// The list closes with a singleton (p_lo == p_hi) whose level spends
/// everything harvested so far exactly by the closing time.
struct FeasibleInterval {
  std::size_t index = 0;  // 1-based position in the list
  double s = 0.0;         // arrival instant (closing time for the singleton)
  double p_lo = 0.0;
  double p_hi = 0.0;
  bool final_singleton = false;
};

enum class StepBranch { above, below, terminal };

/// Outcome of one solver iteration: either commit a segment that ends at an
/// arrival instant (a step) or finish with a single constant run (terminal).
struct SegmentDecision {
  bool terminal = false;
  StepBranch branch = StepBranch::terminal;
  double power = 0.0;     // p_1, or the closing constant power
  double end_time = 0.0;  // i_1 (an arrival instant), or the closing time
  std::size_t n_ub = 0;   // longest prefix sharing a feasible constant power
  std::size_t n_1 = 0;    // interval index the committed segment ends at
};

namespace detail {

/// Intervals for arrivals[1..m] plus the closing singleton at `end_s`.
/// The singleton value spends the full prefix energy sum exactly by end_s.
inline std::vector<FeasibleInterval> build_intervals(
    const HarvestScenario& sc, std::size_t m, double end_s) {
  std::vector<FeasibleInterval> out;
  out.reserve(m + 1);
  double cum = sc.arrivals[0].e;  // energy through arrival n-1 when entering n
  for (std::size_t n = 1; n <= m; ++n) {
    const double s = sc.arrivals[n].t;
    const double p_hi = cum / s;
    cum += sc.arrivals[n].e;
    const double p_lo = (cum - sc.e_max) / s;
    out.push_back({n, s, p_lo, p_hi, false});
  }
  const double p_close = cum / end_s;
  out.push_back({m + 1, end_s, p_close, p_close, true});
  return out;
}

}  // namespace detail

/// Boundary-feasible power ranges for every arrival strictly inside (0, T),
/// closed by the full-depletion singleton at the deadline. Arrivals at or
/// after T cannot be spent and contribute nothing.
inline std::vector<FeasibleInterval> feasible_intervals(
    const HarvestScenario& scenario, double deadline) {
  require_normalized(scenario);
  if (!std::isfinite(deadline) || deadline <= 0.0)
    throw InvalidDeadline("deadline must be positive and finite");
  std::size_t m = 0;
  while (m + 1 < scenario.arrivals.size() &&
         scenario.arrivals[m + 1].t < deadline)
    ++m;
  return detail::build_intervals(scenario, m, deadline);
}

/// Selects the first constant-power segment. Runs the prefix intersection of
/// the interval list to find the longest reachable prefix n_ub; if it covers
/// the whole list, a single constant run to the closing time is feasible and
/// the decision is terminal. Otherwise the first unreachable interval lies
/// strictly above or strictly below the intersection, which fixes the wall
/// the segment must end on (empty battery for above, full for below) and the
/// longest admissible end point n_1.
inline SegmentDecision first_segment(
    std::span<const FeasibleInterval> intervals) {
  if (intervals.empty())
    throw AlgorithmInvariantViolated("first_segment: empty interval list");

  double max_hi = 0.0;
  for (const FeasibleInterval& iv : intervals)
    max_hi = std::max(max_hi, iv.p_hi);
  const double eps = 1e-9 * max_hi;  // touching intervals count as overlapping

  const std::size_t count = intervals.size();
  std::vector<double> run_lo(count), run_hi(count);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::size_t n_ub = 0;
  for (std::size_t k = 0; k < count; ++k) {
    lo = std::max(lo, intervals[k].p_lo);
    hi = std::min(hi, intervals[k].p_hi);
    if (lo > hi + eps) break;
    run_lo[k] = lo;
    run_hi[k] = hi;
    n_ub = k + 1;
  }
  if (n_ub == 0)
    throw AlgorithmInvariantViolated("first_segment: empty first interval");

  if (n_ub == count) {
    const FeasibleInterval& last = intervals.back();
    SegmentDecision dec;
    dec.terminal = true;
    dec.branch = StepBranch::terminal;
    dec.power = std::max(last.p_hi, 0.0);
    dec.end_time = last.s;
    dec.n_ub = n_ub;
    return dec;
  }

  const FeasibleInterval& next = intervals[n_ub];
  StepBranch branch;
  if (next.p_lo > run_hi[n_ub - 1] + eps)
    branch = StepBranch::above;
  else if (next.p_hi < run_lo[n_ub - 1] - eps)
    branch = StepBranch::below;
  else
    throw AlgorithmInvariantViolated(
        "first_segment: blocking interval neither above nor below");

  std::size_t n_1 = 0;
  double p_1 = 0.0;
  for (std::size_t k = 0; k < n_ub; ++k) {
    const double cand =
        branch == StepBranch::above ? intervals[k].p_hi : intervals[k].p_lo;
    if (cand >= run_lo[k] - eps && cand <= run_hi[k] + eps) {
      n_1 = k + 1;
      p_1 = cand;
    }
  }
  if (n_1 == 0)
    throw AlgorithmInvariantViolated("first_segment: no admissible end point");
  if (p_1 < -eps)
    throw AlgorithmInvariantViolated("first_segment: negative segment power");

  SegmentDecision dec;
  dec.terminal = false;
  dec.branch = branch;
  dec.power = std::max(p_1, 0.0);
  dec.end_time = intervals[n_1 - 1].s;
  dec.n_ub = n_ub;
  dec.n_1 = n_1;
  return dec;
}

/// Residual instance after committing a step: the committed run's leftover
/// becomes the initial battery (arrivals at exactly i_1 are included) and
/// later arrivals shift left by i_1. The caller shortens its deadline or bit
/// target separately.
inline HarvestScenario shift_problem(const HarvestScenario& scenario,
                                     const SegmentDecision& decision) {
  require_normalized(scenario);
  if (decision.terminal)
    throw AlgorithmInvariantViolated("shift_problem: terminal decision");
  const double i_1 = decision.end_time;
  const double p_1 = decision.power;

  double cum = 0.0;
  std::size_t idx = 0;
  while (idx < scenario.arrivals.size() && scenario.arrivals[idx].t <= i_1)
    cum += scenario.arrivals[idx++].e;
  double e_0 = cum - i_1 * p_1;

  const double slack =
      1e-9 * std::max(scenario.total_energy(), scenario.e_max);
  if (e_0 < -slack || e_0 > scenario.e_max + slack)
    throw AlgorithmInvariantViolated(
        "shift_problem: residual battery " + std::to_string(e_0) +
        " outside [0, e_max]");
  e_0 = std::clamp(e_0, 0.0, scenario.e_max);

  HarvestScenario shifted;
  shifted.e_max = scenario.e_max;
  shifted.normalized = true;
  shifted.arrivals.push_back({0.0, e_0});
  for (; idx < scenario.arrivals.size(); ++idx)
    shifted.arrivals.push_back(
        {scenario.arrivals[idx].t - i_1, scenario.arrivals[idx].e});
  return shifted;
}

struct SolveTrace {
  std::vector<SegmentDecision> decisions;
};

/// Maximum-throughput schedule for the window [0, deadline]. Purely
/// geometric: never evaluates a rate function, so the result is identical
/// for every valid rate. Output satisfies, up to tolerance: breakpoints only
/// at arrival instants (except the last), no overflow or deficit, power
/// increases only on an empty battery and decreases only on a full one, and
/// full depletion at the deadline.
inline PowerPolicy solve_max_throughput(const HarvestScenario& scenario,
                                        double deadline,
                                        SolveTrace* trace = nullptr) {
  require_normalized(scenario);
  if (!std::isfinite(deadline) || deadline <= 0.0)
    throw InvalidDeadline("deadline must be positive and finite");

  PowerPolicy policy;
  policy.horizon = deadline;
  HarvestScenario current = scenario;
  // Shifted instances map onto suffixes of the original arrival list, so
  // committed breakpoints can be emitted as the exact original instants
  // instead of accumulating shifted times.
  std::size_t base = 0;
  double offset = 0.0;  // absolute time of the last committed breakpoint
  const std::size_t max_iterations = scenario.arrivals.size() + 1;
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= max_iterations)
      throw AlgorithmInvariantViolated(
          "solve_max_throughput: iteration bound exceeded");
    const auto intervals = feasible_intervals(current, deadline - offset);
    const SegmentDecision dec = first_segment(intervals);
    if (trace) trace->decisions.push_back(dec);
    if (dec.terminal) {
      policy.segments.push_back({deadline, dec.power});
      break;
    }
    base += dec.n_1;
    const double end_abs = scenario.arrivals[base].t;
    policy.segments.push_back({end_abs, dec.power});
    offset = end_abs;
    current = shift_problem(current, dec);
  }
  return policy;
}

namespace detail {

struct VirtualDeadline {
  double s = 0.0;              // candidate completion instant
  double energy = 0.0;         // energy available to the closing run
  std::size_t last_arrival = 0;  // index of the last arrival at or before s
};

/// Earliest time s at which one constant run spending all energy harvested
/// in the enclosing epoch window would depart `bits`. Per epoch (s_i, s_i+1]
/// the reachable bits f(s) = s * r(A_i / s) strictly increase (concavity
/// with r(0) = 0), so epochs are scanned left to right and the root is
/// bisected inside the first epoch whose right end reaches the target. When
/// the target falls inside the jump at an arrival, the scan saturates at
/// that arrival instant; the closing run is then infeasible by construction
/// and the caller takes an ordinary step instead.
inline VirtualDeadline find_virtual_deadline(const HarvestScenario& scenario,
                                             double bits,
                                             const RateFunction& rate) {
  const double total = scenario.total_energy();
  const double bound = rate.derivative_at_zero * total;
  if (!(bits < bound))
    throw UnreachableBitTarget(
        "bit target " + std::to_string(bits) +
            " at or above the deliverable supremum " + std::to_string(bound),
        bound);

  const auto& arr = scenario.arrivals;
  double cum = 0.0;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    cum += arr[i].e;
    if (cum <= 0.0) continue;
    const double available = cum;
    const auto reach = [&](double s) { return s * rate(available / s); };

    const double lo = arr[i].t;
    double hi;
    if (i + 1 < arr.size()) {
      hi = arr[i + 1].t;
      if (reach(hi) < bits) continue;
    } else {
      hi = std::max(lo, 1.0);
      while (reach(hi) < bits) {
        hi *= 2.0;
        if (hi > 1e300)
          throw UnreachableBitTarget(
              "bit target numerically indistinguishable from the supremum " +
                  std::to_string(bound),
              bound);
      }
    }

    double a = lo;
    double b = hi;
    while (b - a > 1e-12 * b) {
      const double mid = 0.5 * (a + b);
      (reach(mid) >= bits ? b : a) = mid;
    }
    return {b, available, i};
  }
  throw AlgorithmInvariantViolated("virtual deadline scan failed");
}

}  // namespace detail

/// Candidate completion instant for a bit target: see
/// detail::find_virtual_deadline. Throws UnreachableBitTarget when the
/// target meets or exceeds r'(0) times the total harvest.
inline double virtual_deadline(const HarvestScenario& scenario, double bits,
                               const RateFunction& rate) {
  require_normalized(scenario);
  if (!std::isfinite(bits) || bits <= 0.0)
    throw InvalidBitTarget("bit target must be positive and finite");
  return detail::find_virtual_deadline(scenario, bits, rate).s;
}

struct MinTimeResult {
  PowerPolicy policy;
  double completion_time = 0.0;
};

/// Minimum completion time for `bits`. Each iteration recomputes the virtual
/// completion candidate for the residual bit target, builds the interval
/// list up to it, and applies the same step rule as solve_max_throughput;
/// the schedules of the two problems coincide for matching parameters.
inline MinTimeResult solve_min_time(const HarvestScenario& scenario,
                                    double bits, const RateFunction& rate,
                                    SolveTrace* trace = nullptr) {
  require_normalized(scenario);
  if (!std::isfinite(bits) || bits < 0.0)
    throw InvalidBitTarget("bit target must be nonnegative and finite");

  MinTimeResult result;
  if (bits == 0.0) return result;

  HarvestScenario current = scenario;
  double remaining = bits;
  std::size_t base = 0;
  double offset = 0.0;  // absolute time of the last committed breakpoint
  const std::size_t max_iterations = scenario.arrivals.size() + 1;
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= max_iterations)
      throw AlgorithmInvariantViolated(
          "solve_min_time: iteration bound exceeded");
    detail::VirtualDeadline vd;
    try {
      vd = detail::find_virtual_deadline(current, remaining, rate);
    } catch (const UnreachableBitTarget&) {
      if (offset == 0.0 && remaining == bits) throw;
      // Report the supremum in terms of the original instance: bits already
      // scheduled plus the most the residual energy can ever deliver.
      const double global_bound =
          (bits - remaining) +
          rate.derivative_at_zero * current.total_energy();
      throw UnreachableBitTarget(
          "bit target " + std::to_string(bits) +
              " at or above the deliverable supremum " +
              std::to_string(global_bound),
          global_bound);
    }
    const auto intervals =
        detail::build_intervals(current, vd.last_arrival, vd.s);
    const SegmentDecision dec = first_segment(intervals);
    if (trace) trace->decisions.push_back(dec);
    if (dec.terminal) {
      result.policy.segments.push_back({offset + vd.s, dec.power});
      break;
    }
    base += dec.n_1;
    const double end_abs = scenario.arrivals[base].t;
    result.policy.segments.push_back({end_abs, dec.power});
    remaining -= (end_abs - offset) * rate(dec.power);
    offset = end_abs;
    current = shift_problem(current, dec);
    if (remaining <= 1e-13 * bits) break;  // target hit at a step boundary
  }
  result.completion_time = result.policy.end_time();
  result.policy.horizon = result.completion_time;
  return result;
}

}  // namespace ehsched
