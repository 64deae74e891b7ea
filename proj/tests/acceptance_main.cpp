// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ehsched/ehsched.hpp"

using namespace ehsched;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int number, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number,
              what.c_str(), detail.c_str());
  if (!pass) ++failures;
}

HarvestScenario sample() {
  HarvestScenario raw;
  raw.e_max = 10.0;
  raw.arrivals = {{0, 2}, {2, 1}, {4, 6}, {5, 4}, {7, 8}, {11, 1}};
  return normalize_scenario(raw);
}

char buf[256];

// ---------------------------------------------------------------------------
// 1. Golden trace on the worked scenario: first-iteration reach bound of 3,
//    exactly three segments (4, 0.75), (7, 8/3), (12, 2.2) to 1e-9, battery
//    empty at t = 4 and t = 12 and full just after t = 7. Milliseconds.
void criterion_1() {
  const auto start = Clock::now();
  const HarvestScenario sc = sample();
  SolveTrace trace;
  const PowerPolicy policy = solve_max_throughput(sc, 12.0, &trace);

  bool pass = trace.decisions.size() == 3 && trace.decisions[0].n_ub == 3;
  const double want[][2] = {{4.0, 0.75}, {7.0, 8.0 / 3.0}, {12.0, 2.2}};
  pass = pass && policy.segments.size() == 3;
  if (pass)
    for (int i = 0; i < 3; ++i)
      pass = pass && std::abs(policy.segments[i].until - want[i][0]) <= 1e-9 &&
             std::abs(policy.segments[i].power - want[i][1]) <= 1e-9;

  const BatteryTrajectory traj =
      battery_trajectory(sc, policy, BatteryMode::strict);
  const BatteryEvent* at4 = traj.at(4.0);
  const BatteryEvent* at7 = traj.at(7.0);
  const BatteryEvent* at12 = traj.at(12.0);
  pass = pass && at4 && std::abs(at4->level_before) <= 1e-9;
  pass = pass && at7 && std::abs(at7->level_after - sc.e_max) <= 1e-9;
  pass = pass && at12 && std::abs(at12->level_before) <= 1e-9;

  const double elapsed = seconds_since(start);
  pass = pass && elapsed < 0.5;
  std::snprintf(buf, sizeof(buf), "n_ub=%zu, %zu segments, %.2f ms",
                trace.decisions.empty() ? 0 : trace.decisions[0].n_ub,
                policy.segments.size(), elapsed * 1e3);
  report(1, pass, "golden trace on the worked scenario", buf);
}

// ---------------------------------------------------------------------------
// 2. Deadline/bit-target duality on 1000 generated scenarios: recovered
//    deadline and recovered bits within 1e-6 relative, segment lists within
//    1e-7, under ten seconds.
void criterion_2() {
  const auto start = Clock::now();
  const RateFunction rate = awgn_rate();
  double max_t_dev = 0.0, max_b_dev = 0.0, max_seg_dev = 0.0;
  int mismatched = 0, solved = 0;
  detail::PortableRng deadline_draw(0x5eedf00d);
  for (int i = 0; i < 1000; ++i) {
    const double deadline = deadline_draw.uniform(10.0, 200.0);
    const GenParams params{100.0, 5.0, deadline,
                           split_seed(20260809, (std::uint64_t)i)};
    const HarvestScenario sc = normalize_scenario(generate_random(params));
    const PowerPolicy policy = solve_max_throughput(sc, deadline);
    const double bits = throughput(policy, rate);
    if (bits <= 0.0) continue;
    ++solved;

    const MinTimeResult mt = solve_min_time(sc, bits, rate);
    max_t_dev = std::max(max_t_dev,
                         std::abs(mt.completion_time - deadline) / deadline);
    const double bits_back =
        throughput(solve_max_throughput(sc, mt.completion_time), rate);
    max_b_dev = std::max(max_b_dev, std::abs(bits_back - bits) / bits);

    if (mt.policy.segments.size() != policy.segments.size()) {
      ++mismatched;
      continue;
    }
    for (std::size_t k = 0; k < policy.segments.size(); ++k) {
      max_seg_dev = std::max(
          max_seg_dev,
          std::abs(policy.segments[k].until - mt.policy.segments[k].until) /
              std::max(1.0, deadline));
      max_seg_dev = std::max(
          max_seg_dev,
          std::abs(policy.segments[k].power - mt.policy.segments[k].power) /
              std::max(1.0, policy.segments[k].power));
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = solved > 990 && mismatched == 0 && max_t_dev < 1e-6 &&
                    max_b_dev < 1e-6 && max_seg_dev < 1e-7 && elapsed < 10.0;
  std::snprintf(buf, sizeof(buf),
                "%d scenarios, max dev: T %.2e, B %.2e, segments %.2e, %.2f s",
                solved, max_t_dev, max_b_dev, max_seg_dev, elapsed);
  report(2, pass, "deadline/bit-target round trip", buf);
}

// ---------------------------------------------------------------------------
// 3. Grid-search equivalence on 200 instances of up to 4 epochs: the 0.01
//    grid best never beats the solver by more than T * r'(0) * 0.01, under
//    sixty seconds.
void criterion_3() {
  const auto start = Clock::now();
  const RateFunction rate = awgn_rate();
  const double step = 0.01;
  int checked = 0, failed = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 200; ++i) {
    detail::PortableRng rng(split_seed(0x0e4ac1e, (std::uint64_t)i));
    HarvestScenario raw;
    raw.e_max = 0.8;
    const int arrivals = 1 + (int)(rng.uniform01() * 4.0);
    double t = 0.0;
    for (int k = 0; k < arrivals; ++k) {
      raw.arrivals.push_back({t, rng.uniform(0.08, 0.6)});
      t += rng.uniform(0.8, 1.6);
    }
    const double deadline = t;
    const HarvestScenario sc = normalize_scenario(raw);
    const OracleReport rep =
        brute_force_max_throughput(sc, deadline, rate, step);
    ++checked;
    if (!rep.pass) ++failed;
    worst_gap = std::min(worst_gap, rep.gap);
  }
  const double elapsed = seconds_since(start);
  const bool pass = checked == 200 && failed == 0 && elapsed < 60.0;
  std::snprintf(buf, sizeof(buf),
                "%d instances, %d over the bound, worst gap %.2e, %.2f s",
                checked, failed, worst_gap, elapsed);
  report(3, pass, "brute-force grid equivalence", buf);
}

// ---------------------------------------------------------------------------
// 4. Structure of the optimum on 10^4 generated scenarios: breakpoints only
//    at arrivals, strict feasibility, power rises only on an empty battery
//    and falls only on a full one (1e-7 * total energy), full depletion.
void criterion_4() {
  const auto start = Clock::now();
  int bad_breakpoints = 0, infeasible = 0, bad_walls = 0, not_depleted = 0;
  for (int i = 0; i < 10000; ++i) {
    detail::PortableRng draw(split_seed(0xdead10cc, (std::uint64_t)i));
    const double deadline = draw.uniform(5.0, 30.0);
    const GenParams params{10.0, 2.0, deadline,
                           split_seed(0xbeef, (std::uint64_t)i)};
    const HarvestScenario sc = normalize_scenario(generate_random(params));
    const PowerPolicy policy = solve_max_throughput(sc, deadline);
    const double tol = 1e-7 * std::max(1.0, sc.total_energy());

    for (std::size_t k = 0; k + 1 < policy.segments.size(); ++k) {
      bool at_arrival = false;
      for (const Arrival& a : sc.arrivals)
        at_arrival |= (a.t == policy.segments[k].until);
      if (!at_arrival) ++bad_breakpoints;
    }
    if (!is_feasible(sc, policy).ok) ++infeasible;

    const BatteryTrajectory traj =
        battery_trajectory(sc, policy, BatteryMode::strict);
    for (std::size_t k = 0; k + 1 < policy.segments.size(); ++k) {
      const BatteryEvent* ev = traj.at(policy.segments[k].until);
      const double before = policy.segments[k].power;
      const double after = policy.segments[k + 1].power;
      if (!ev) {
        ++bad_walls;
        continue;
      }
      if (after > before && std::abs(ev->level_before) > tol) ++bad_walls;
      if (after < before && std::abs(ev->level_after - sc.e_max) > tol)
        ++bad_walls;
    }
    const BatteryEvent* end = traj.at(deadline);
    if (!end || std::abs(end->level_before) > tol) ++not_depleted;
  }
  const double elapsed = seconds_since(start);
  const bool pass = bad_breakpoints == 0 && infeasible == 0 &&
                    bad_walls == 0 && not_depleted == 0;
  std::snprintf(
      buf, sizeof(buf),
      "10^4 scenarios: %d stray breakpoints, %d infeasible, %d wall "
      "violations, %d undepleted, %.2f s",
      bad_breakpoints, infeasible, bad_walls, not_depleted, elapsed);
  report(4, pass, "structure of the optimum", buf);
}

// ---------------------------------------------------------------------------
// 5. Rate independence: schedules are bit-identical when solved inside an
//    awgn pipeline and a sqrt(1+p)-1 pipeline, on 1000 scenarios.
void criterion_5() {
  const auto start = Clock::now();
  const RateFunction rate_a = awgn_rate();
  const RateFunction rate_b = sqrt_rate();
  int differing = 0;
  double max_bits_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    detail::PortableRng draw(split_seed(0x5a5a5a, (std::uint64_t)i));
    const double deadline = draw.uniform(5.0, 60.0);
    const GenParams params{50.0, 4.0, deadline,
                           split_seed(0xa5a5a5, (std::uint64_t)i)};
    const HarvestScenario sc = normalize_scenario(generate_random(params));

    const PowerPolicy pa = solve_max_throughput(sc, deadline);
    const double bits_a = throughput(pa, rate_a);
    const PowerPolicy pb = solve_max_throughput(sc, deadline);
    const double bits_b = throughput(pb, rate_b);

    if (pa.segments.size() != pb.segments.size()) {
      ++differing;
      continue;
    }
    bool same = true;
    for (std::size_t k = 0; k < pa.segments.size(); ++k)
      same = same && pa.segments[k].until == pb.segments[k].until &&
             pa.segments[k].power == pb.segments[k].power;
    if (!same) ++differing;
    if (bits_a > 0.0)
      max_bits_gap =
          std::max(max_bits_gap, std::abs(bits_a - bits_b) / bits_a);
  }
  const double elapsed = seconds_since(start);
  const bool pass = differing == 0;
  std::snprintf(buf, sizeof(buf),
                "%d differing schedules; rates themselves differ by up to "
                "%.0f%% in bits; %.2f s",
                differing, 100.0 * max_bits_gap, elapsed);
  report(5, pass, "rate independence of the schedule", buf);
}

// ---------------------------------------------------------------------------
// 6. Baseline sandwich with the long-horizon statistics (capacity 100,
//    uniform energies, exponential gaps of mean 5, horizon 10000) on 100
//    seeds, plus the battery-capacity sensitivity direction: the on-off
//    shortfall shrinks as the battery grows.
void criterion_6() {
  const auto start = Clock::now();
  const RateFunction rate = awgn_rate();
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const GenParams params{100.0, 5.0, 10000.0,
                           split_seed(0xf167, (std::uint64_t)i)};
    const HarvestScenario raw = generate_random(params);
    const HarvestScenario sc = normalize_scenario(raw);
    const double optimal =
        throughput(solve_max_throughput(sc, params.horizon), rate);
    const double onoff =
        throughput(on_off_policy(sc, params.horizon), rate);
    const double unc = unconstrained_bound(raw, params.horizon, rate);
    const double tol = 1e-9 * std::max(1.0, unc);
    if (!(onoff <= optimal + tol && optimal <= unc + tol)) ++violations;
  }

  const double capacities[] = {30.0, 100.0, 300.0, 1000.0};
  double gains[4] = {};
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < 30; ++i) {
      const GenParams params{100.0, 5.0, 10000.0,
                             split_seed(0x7e4d, (std::uint64_t)i)};
      HarvestScenario raw = generate_random(params);
      raw.e_max = capacities[c];  // battery decoupled from the energy sizes
      const HarvestScenario sc = normalize_scenario(raw);
      const double optimal =
          throughput(solve_max_throughput(sc, params.horizon), rate);
      const double onoff =
          throughput(on_off_policy(sc, params.horizon), rate);
      gains[c] += (optimal - onoff) / optimal / 30.0;
    }
  }
  const bool trend =
      gains[0] > gains[1] && gains[1] > gains[2] && gains[2] > gains[3];

  const double elapsed = seconds_since(start);
  const bool pass = violations == 0 && trend;
  std::snprintf(buf, sizeof(buf),
                "%d sandwich violations; on-off shortfall by capacity: "
                "%.3f > %.3f > %.3f > %.3f; %.1f s",
                violations, gains[0], gains[1], gains[2], gains[3], elapsed);
  report(6, pass, "baseline ordering and capacity sensitivity", buf);
}

// ---------------------------------------------------------------------------
// 7. The throughput-by-deadline and completion-time-by-target curves drawn
//    on the worked scenario coincide as point sets within 1e-6 and are
//    strictly monotone.
void criterion_7() {
  const auto start = Clock::now();
  const HarvestScenario sc = sample();
  const RateFunction rate = awgn_rate();
  bool monotone_bits = true, monotone_time = true;
  double max_dev = 0.0;
  double prev_bits = 0.0, prev_time = 0.0;
  for (int i = 0; i <= 22; ++i) {
    const double deadline = 1.0 + 0.5 * i;
    const double bits = throughput(solve_max_throughput(sc, deadline), rate);
    monotone_bits = monotone_bits && bits > prev_bits;
    prev_bits = bits;

    const MinTimeResult mt = solve_min_time(sc, bits, rate);
    max_dev =
        std::max(max_dev, std::abs(mt.completion_time - deadline) / deadline);
    monotone_time = monotone_time && mt.completion_time > prev_time;
    prev_time = mt.completion_time;
  }
  const double elapsed = seconds_since(start);
  const bool pass = monotone_bits && monotone_time && max_dev < 1e-6;
  std::snprintf(buf, sizeof(buf),
                "23 grid points, curves coincide to %.2e, monotone %s/%s, "
                "%.2f ms",
                max_dev, monotone_bits ? "yes" : "no",
                monotone_time ? "yes" : "no", elapsed * 1e3);
  report(7, pass, "overlaid sweep curves coincide", buf);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
