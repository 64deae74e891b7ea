// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehsched/baselines.hpp"
#include "ehsched/errors.hpp"
#include "ehsched/oracle.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/scenario.hpp"

namespace ehsched {

/// Random-scenario parameters: energies uniform on [0, e_max], inter-arrival
/// gaps exponential with the given mean, arrivals past the horizon discarded.
struct GenParams {
  double e_max = 100.0;
  double mean_interarrival = 5.0;
  double horizon = 10000.0;
  std::uint64_t seed = 0;
};

/// Stream-splitting rule for batch runs: scenario index XORed into the seed.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  return base ^ index;
}

namespace detail {

// mt19937_64 state transitions are pinned by the standard; drawing doubles
// through explicit bit manipulation keeps the byte stream identical across
// standard libraries, which library distributions would not.
struct PortableRng {
  std::mt19937_64 engine;

  explicit PortableRng(std::uint64_t seed) : engine(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }
  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }
};

}  // namespace detail

/// Deterministic raw scenario draw: the first arrival lands at t = 0, gaps
/// are cumulative exponential draws, energies uniform on [0, e_max].
/// Normalization is the consumer's job.
inline HarvestScenario generate_random(const GenParams& params) {
  if (!(params.e_max > 0.0) || !(params.mean_interarrival > 0.0) ||
      !(params.horizon > 0.0))
    throw InvalidScenario("generator parameters must be positive");
  detail::PortableRng rng(params.seed);
  HarvestScenario scenario;
  scenario.e_max = params.e_max;
  double t = 0.0;
  scenario.arrivals.push_back({0.0, rng.uniform(0.0, params.e_max)});
  for (;;) {
    t += rng.exponential(params.mean_interarrival);
    if (t > params.horizon) break;
    scenario.arrivals.push_back({t, rng.uniform(0.0, params.e_max)});
  }
  return scenario;
}

namespace detail {

inline void atomic_write(const std::filesystem::path& path,
                         const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& context) {
  if (!j.contains(key))
    throw ParseError(context + ": missing field \"" + key + "\"");
  if (!j[key].is_number())
    throw ParseError(context + ": field \"" + key + "\" is not a number");
  return j[key].get<double>();
}

inline std::string format_sig12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const HarvestScenario& scenario) {
  HarvestScenario copy = scenario;
  std::stable_sort(
      copy.arrivals.begin(), copy.arrivals.end(),
      [](const Arrival& a, const Arrival& b) { return a.t < b.t; });
  nlohmann::json arr = nlohmann::json::array();
  for (const Arrival& a : copy.arrivals)
    arr.push_back({{"t", a.t}, {"e", a.e}});
  return {{"e_max", copy.e_max}, {"arrivals", std::move(arr)}};
}

inline void write_scenario(const HarvestScenario& scenario,
                           const std::filesystem::path& path) {
  detail::atomic_write(path, scenario_to_json(scenario).dump(2) + "\n");
}

/// Parses and normalizes a scenario file. Validation precedes normalization
/// so malformed content reports the offending field.
inline HarvestScenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("scenario file " + path.string() + ": " + e.what());
  }
  if (!j.is_object())
    throw ParseError("scenario file " + path.string() + ": not an object");

  HarvestScenario raw;
  raw.e_max = detail::require_number(j, "e_max", path.string());
  if (!std::isfinite(raw.e_max) || raw.e_max <= 0.0)
    throw ParseError(path.string() + ": e_max must be positive and finite");
  if (!j.contains("arrivals") || !j["arrivals"].is_array())
    throw ParseError(path.string() + ": missing \"arrivals\" array");
  std::size_t index = 0;
  for (const nlohmann::json& entry : j["arrivals"]) {
    const std::string ctx =
        path.string() + ": arrivals[" + std::to_string(index++) + "]";
    if (!entry.is_object()) throw ParseError(ctx + ": not an object");
    Arrival a;
    a.t = detail::require_number(entry, "t", ctx);
    a.e = detail::require_number(entry, "e", ctx);
    if (!std::isfinite(a.t) || !std::isfinite(a.e))
      throw ParseError(ctx + ": non-finite value");
    if (a.t < 0.0) throw ParseError(ctx + ": negative time");
    if (a.e < 0.0) throw ParseError(ctx + ": negative energy");
    raw.arrivals.push_back(a);
  }
  return normalize_scenario(raw);
}

inline nlohmann::json policy_to_json(const PowerPolicy& policy) {
  nlohmann::json segs = nlohmann::json::array();
  for (const PowerSegment& s : policy.segments)
    segs.push_back({{"until", s.until}, {"power", s.power}});
  return {{"horizon", policy.horizon}, {"segments", std::move(segs)}};
}

inline void write_policy_json(const PowerPolicy& policy,
                              const std::filesystem::path& path) {
  detail::atomic_write(path, policy_to_json(policy).dump(2) + "\n");
}

inline void write_policy_csv(const PowerPolicy& policy, std::ostream& out) {
  out << "until,power\n";
  char buf[64];
  for (const PowerSegment& s : policy.segments) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", s.until, s.power);
    out << buf;
  }
}

inline void write_policy_csv(const PowerPolicy& policy,
                             const std::filesystem::path& path) {
  std::ostringstream out;
  write_policy_csv(policy, out);
  detail::atomic_write(path, out.str());
}

inline PowerPolicy read_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open policy file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("policy file " + path.string() + ": " + e.what());
  }
  PowerPolicy policy;
  policy.horizon = detail::require_number(j, "horizon", path.string());
  if (!j.contains("segments") || !j["segments"].is_array())
    throw ParseError(path.string() + ": missing \"segments\" array");
  std::size_t index = 0;
  for (const nlohmann::json& entry : j["segments"]) {
    const std::string ctx =
        path.string() + ": segments[" + std::to_string(index++) + "]";
    policy.segments.push_back({detail::require_number(entry, "until", ctx),
                               detail::require_number(entry, "power", ctx)});
  }
  try {
    validate_policy(policy);
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return policy;
}

/// One row of the feasible-tunnel export. Rows sit at arrival instants (both
/// sides of the harvest jump) and at policy breakpoints; a cumulative-spend
/// curve that stays between lower_wall and cum_harvest at every row is
/// energy-feasible.
struct TunnelRow {
  double t = 0.0;
  double cum_harvest = 0.0;
  double lower_wall = 0.0;
  double cum_spent = 0.0;  // meaningful only when the export had a policy
};

inline std::vector<TunnelRow> export_tunnel(
    const HarvestScenario& scenario, const PowerPolicy* policy = nullptr) {
  require_normalized(scenario);
  std::vector<double> times;
  for (const Arrival& a : scenario.arrivals)
    if (a.e > 0.0) times.push_back(a.t);
  if (policy)
    for (const PowerSegment& s : policy->segments) times.push_back(s.until);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<TunnelRow> rows;
  for (double t : times) {
    const double before = scenario.energy_before(t);
    double at = before;
    for (const Arrival& a : scenario.arrivals)
      if (a.t == t) at += a.e;
    const double spent = policy ? policy->spend_by(t) : 0.0;
    rows.push_back({t, before, std::max(0.0, before - scenario.e_max), spent});
    if (at != before)
      rows.push_back({t, at, std::max(0.0, at - scenario.e_max), spent});
  }
  return rows;
}

inline void write_tunnel_csv(const std::vector<TunnelRow>& rows,
                             bool with_spent, std::ostream& out) {
  out << (with_spent ? "t,cum_harvest,lower_wall,cum_spent\n"
                     : "t,cum_harvest,lower_wall\n");
  for (const TunnelRow& r : rows) {
    out << detail::format_sig12(r.t) << ',' << detail::format_sig12(r.cum_harvest)
        << ',' << detail::format_sig12(r.lower_wall);
    if (with_spent) out << ',' << detail::format_sig12(r.cum_spent);
    out << '\n';
  }
}

inline void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                                 std::ostream& out) {
  out << "id,bits_opt,bits_onoff,bits_unc\n";
  for (const ComparisonRow& r : rows)
    out << r.id << ',' << detail::format_sig12(r.bits_optimal) << ','
        << detail::format_sig12(r.bits_onoff) << ','
        << detail::format_sig12(r.bits_unconstrained) << '\n';
}

inline nlohmann::json oracle_report_to_json(const OracleReport& report) {
  return {{"best_bits", report.best_bits},
          {"solver_bits", report.solver_bits},
          {"gap", report.gap},
          {"grid_step", report.grid_step},
          {"error_bound", report.error_bound},
          {"verdict", report.pass ? "pass" : "fail"},
          {"best_policy", policy_to_json(report.best_policy)}};
}

}  // namespace ehsched
