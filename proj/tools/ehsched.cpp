// SPDX-License-Identifier: Apache-2.0
//
// Command-line front door: solves scenarios from files or the generator and
// emits plot-ready tables. Exit codes: 0 success, 2 invalid input,
// 3 unreachable bit target, 4 internal invariant violation.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ehsched/ehsched.hpp"

namespace {

using namespace ehsched;

struct Options {
  std::string scenario_path;
  std::string gen_spec;
  std::string policy_path;
  std::string out_path;
  std::string rate_name = "awgn";
  std::string onoff_mode = "realized";
  std::uint64_t seed = 0;
  double deadline = 0.0;
  double bits = -1.0;
  double tol = 1e-6;
  double t_min = 0.0;
  double t_max = 0.0;
  int count = 100;
  bool have_deadline = false;
  bool have_bits = false;
};

GenParams parse_gen_spec(const std::string& spec, std::uint64_t seed) {
  GenParams params;
  params.seed = seed;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InvalidScenario("generator spec entry without '=': " + item);
    const std::string key = item.substr(0, eq);
    double value;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidScenario("generator spec value not numeric: " + item);
    }
    if (key == "emax" || key == "e_max")
      params.e_max = value;
    else if (key == "mu" || key == "mean")
      params.mean_interarrival = value;
    else if (key == "T" || key == "horizon")
      params.horizon = value;
    else
      throw InvalidScenario("unknown generator spec key: " + key);
  }
  if (!(params.e_max > 0.0) || !(params.mean_interarrival > 0.0) ||
      !(params.horizon > 0.0))
    throw InvalidScenario("generator spec needs positive emax, mu and T");
  return params;
}

// Scenario plus the raw (untruncated) form the unconstrained bound wants.
struct LoadedScenario {
  HarvestScenario raw;
  HarvestScenario normalized;
  double default_deadline = 0.0;
};

LoadedScenario load_scenario(const Options& opt) {
  LoadedScenario loaded;
  if (!opt.scenario_path.empty()) {
    loaded.normalized = read_scenario(opt.scenario_path);
    loaded.raw = loaded.normalized;
    loaded.default_deadline = 0.0;  // file scenarios must state a deadline
  } else if (!opt.gen_spec.empty()) {
    const GenParams params = parse_gen_spec(opt.gen_spec, opt.seed);
    loaded.raw = generate_random(params);
    loaded.normalized = normalize_scenario(loaded.raw);
    loaded.default_deadline = params.horizon;
  } else {
    throw InvalidScenario("one of --scenario or --gen is required");
  }
  return loaded;
}

double pick_deadline(const Options& opt, const LoadedScenario& loaded) {
  if (opt.have_deadline) return opt.deadline;
  if (loaded.default_deadline > 0.0) return loaded.default_deadline;
  throw InvalidDeadline("--deadline is required with --scenario");
}

void emit(const Options& opt, const std::string& contents) {
  if (opt.out_path.empty()) {
    std::fputs(contents.c_str(), stdout);
    return;
  }
  const std::filesystem::path path(opt.out_path);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

void write_policy_file(const PowerPolicy& policy, const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    write_policy_csv(policy, std::filesystem::path(path));
  else
    write_policy_json(policy, std::filesystem::path(path));
}

std::string feasibility_line(const HarvestScenario& sc,
                             const PowerPolicy& policy) {
  const FeasibilityReport rep = is_feasible(sc, policy);
  if (rep.ok) return "feasible ok";
  char line[160];
  std::snprintf(line, sizeof(line), "feasible VIOLATION %s at t=%.12g (%.12g)",
                rep.first->kind == ViolationKind::deficit ? "deficit"
                                                          : "overflow",
                rep.first->time, rep.first->magnitude);
  return line;
}

int cmd_solve(const Options& opt) {
  const LoadedScenario loaded = load_scenario(opt);
  const double deadline = pick_deadline(opt, loaded);
  const RateFunction rate = rate_by_name(opt.rate_name);

  const PowerPolicy policy = solve_max_throughput(loaded.normalized, deadline);
  if (!opt.out_path.empty()) write_policy_file(policy, opt.out_path);

  std::printf("B* %.12g\n", throughput(policy, rate));
  std::printf("segments %zu\n", policy.segments.size());
  std::printf("%s\n", feasibility_line(loaded.normalized, policy).c_str());
  return 0;
}

int cmd_mintime(const Options& opt) {
  const LoadedScenario loaded = load_scenario(opt);
  if (!opt.have_bits) throw InvalidBitTarget("--bits is required");
  const RateFunction rate = rate_by_name(opt.rate_name);

  const MinTimeResult res =
      solve_min_time(loaded.normalized, opt.bits, rate);
  if (!opt.out_path.empty()) write_policy_file(res.policy, opt.out_path);

  std::printf("T* %.12g\n", res.completion_time);
  std::printf("segments %zu\n", res.policy.segments.size());
  std::printf("%s\n",
              feasibility_line(loaded.normalized, res.policy).c_str());
  return 0;
}

int cmd_compare(const Options& opt) {
  if (opt.gen_spec.empty())
    throw InvalidScenario("compare needs --gen parameters");
  const GenParams base = parse_gen_spec(opt.gen_spec, opt.seed);
  const RateFunction rate = rate_by_name(opt.rate_name);
  const double deadline = opt.have_deadline ? opt.deadline : base.horizon;

  std::optional<double> onoff_level;
  if (opt.onoff_mode == "distribution")
    onoff_level = 0.5 * base.e_max / base.mean_interarrival;
  else if (opt.onoff_mode != "realized")
    throw InvalidScenario("--onoff must be realized or distribution");

  std::vector<ComparisonRow> rows;
  double sum_opt = 0.0, sum_onoff = 0.0, sum_unc = 0.0;
  int violations = 0;
  for (int i = 0; i < opt.count; ++i) {
    GenParams params = base;
    params.seed = split_seed(opt.seed, (std::uint64_t)i);
    const HarvestScenario raw = generate_random(params);
    const HarvestScenario sc = normalize_scenario(raw);

    const double optimal =
        throughput(solve_max_throughput(sc, deadline), rate);
    const double onoff =
        throughput(on_off_policy(sc, deadline, onoff_level), rate);
    const double unc = unconstrained_bound(raw, deadline, rate);
    rows.push_back(ComparisonRow::make("seed_" + std::to_string(params.seed),
                                       optimal, onoff, unc));
    const double tol = 1e-9 * std::max(1.0, unc);
    if (!(onoff <= optimal + tol && optimal <= unc + tol)) {
      ++violations;
      std::fprintf(stderr,
                   "ordering violation at seed %llu: onoff=%.12g "
                   "optimal=%.12g unconstrained=%.12g\n",
                   (unsigned long long)params.seed, onoff, optimal, unc);
    }
    sum_opt += optimal;
    sum_onoff += onoff;
    sum_unc += unc;
  }
  const double n = std::max(1, opt.count);
  rows.push_back(
      ComparisonRow::make("mean", sum_opt / n, sum_onoff / n, sum_unc / n));

  std::ostringstream csv;
  write_comparison_csv(rows, csv);
  emit(opt, csv.str());
  if (violations > 0) {
    std::fprintf(stderr, "%d ordering violation(s)\n", violations);
    return 4;
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  const LoadedScenario loaded = load_scenario(opt);
  if (!(opt.t_min > 0.0) || !(opt.t_max >= opt.t_min))
    throw InvalidDeadline("sweep needs 0 < --tmin <= --tmax");
  if (opt.count < 1) throw InvalidDeadline("--count must be at least 1");
  const RateFunction rate = rate_by_name(opt.rate_name);

  std::ostringstream csv;
  csv << "curve,t,bits\n";
  char line[128];
  double worst = 0.0;
  bool monotone = true;
  double prev_bits = -1.0, prev_t = -1.0;
  for (int i = 0; i < opt.count; ++i) {
    const double deadline =
        opt.count == 1 ? opt.t_min
                       : opt.t_min + (opt.t_max - opt.t_min) * i /
                                         (opt.count - 1.0);
    const double bits =
        throughput(solve_max_throughput(loaded.normalized, deadline), rate);
    std::snprintf(line, sizeof(line), "B_of_T,%.12g,%.12g\n", deadline, bits);
    csv << line;
    if (bits <= prev_bits) monotone = false;
    prev_bits = bits;

    if (bits <= 0.0) continue;
    const MinTimeResult mt = solve_min_time(loaded.normalized, bits, rate);
    std::snprintf(line, sizeof(line), "T_of_B,%.12g,%.12g\n",
                  mt.completion_time, bits);
    csv << line;
    worst = std::max(worst,
                     std::abs(mt.completion_time - deadline) / deadline);
    if (mt.completion_time <= prev_t) monotone = false;
    prev_t = mt.completion_time;
  }
  emit(opt, csv.str());
  if (worst > opt.tol || !monotone) {
    std::fprintf(stderr,
                 "sweep curves disagree (max deviation %.3e, monotone %s)\n",
                 worst, monotone ? "yes" : "no");
    return 4;
  }
  return 0;
}

int cmd_tunnel(const Options& opt) {
  const LoadedScenario loaded = load_scenario(opt);
  std::optional<PowerPolicy> policy;
  if (!opt.policy_path.empty())
    policy = read_policy(opt.policy_path);
  else if (opt.have_deadline)
    policy = solve_max_throughput(loaded.normalized, opt.deadline);

  const auto rows =
      export_tunnel(loaded.normalized, policy ? &*policy : nullptr);
  std::ostringstream csv;
  write_tunnel_csv(rows, policy.has_value(), csv);
  emit(opt, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Offline transmit-power schedules for an energy-harvesting "
      "transmitter with a finite battery"};
  app.require_subcommand(1);
  Options opt;

  auto add_source = [&](CLI::App* cmd) {
    auto* sc = cmd->add_option("--scenario", opt.scenario_path,
                               "scenario JSON file");
    auto* gen = cmd->add_option(
        "--gen", opt.gen_spec, "generator spec, e.g. emax=100,mu=5,T=10000");
    sc->excludes(gen);
    cmd->add_option("--seed", opt.seed, "base seed for --gen");
    cmd->add_option("--rate", opt.rate_name, "rate function (awgn, sqrt)");
    cmd->add_option("--out", opt.out_path, "output file (default stdout)");
    cmd->add_option("--tol", opt.tol, "relative tolerance for checks");
  };

  CLI::App* solve =
      app.add_subcommand("solve", "maximize bits by a deadline");
  add_source(solve);
  solve->add_option("--deadline", opt.deadline, "transmission deadline")
      ->trigger_on_parse()
      ->each([&](const std::string&) { opt.have_deadline = true; });

  CLI::App* mintime =
      app.add_subcommand("mintime", "minimize the completion time");
  add_source(mintime);
  mintime->add_option("--bits", opt.bits, "bit target")
      ->trigger_on_parse()
      ->each([&](const std::string&) { opt.have_bits = true; });

  CLI::App* compare = app.add_subcommand(
      "compare", "optimal vs on-off vs unconstrained over generated batches");
  add_source(compare);
  compare->add_option("--count", opt.count, "number of scenarios");
  compare->add_option("--deadline", opt.deadline, "deadline override")
      ->each([&](const std::string&) { opt.have_deadline = true; });
  compare->add_option("--onoff", opt.onoff_mode,
                      "on-off level source: realized|distribution");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "throughput-by-deadline and completion-time-by-target curves");
  add_source(sweep);
  sweep->add_option("--tmin", opt.t_min, "smallest deadline")->required();
  sweep->add_option("--tmax", opt.t_max, "largest deadline")->required();
  sweep->add_option("--count", opt.count, "grid points");

  CLI::App* tunnel =
      app.add_subcommand("tunnel", "feasible energy tunnel table");
  add_source(tunnel);
  tunnel->add_option("--policy", opt.policy_path,
                     "overlay a stored policy JSON");
  tunnel->add_option("--deadline", opt.deadline,
                     "solve and overlay the optimal schedule")
      ->each([&](const std::string&) { opt.have_deadline = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve)) return cmd_solve(opt);
    if (app.got_subcommand(mintime)) return cmd_mintime(opt);
    if (app.got_subcommand(compare)) return cmd_compare(opt);
    if (app.got_subcommand(sweep)) return cmd_sweep(opt);
    if (app.got_subcommand(tunnel)) return cmd_tunnel(opt);
  } catch (const UnreachableBitTarget& e) {
    std::fprintf(stderr, "error: %s\nreachability bound: %.12g bits\n",
                 e.what(), e.bound_bits);
    return 3;
  } catch (const AlgorithmInvariantViolated& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
