#include "spshare/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "spshare/analysis.hpp"
#include "spshare/equilibrium.hpp"
#include "spshare/potential.hpp"
#include "spshare/scenario.hpp"
#include "spshare/table_io.hpp"

namespace spshare {

namespace {

constexpr const char* kUsage =
    "usage: spshare <solve|sweep|thresholds|verify> --scenario <file-or-name>"
    " [--out <path>]\n"
    "\n"
    "  solve       equilibrium at the scenario's single bandwidth (JSON)\n"
    "  sweep       bandwidth sweep over the scenario's grid (CSV)\n"
    "  thresholds  overlap entry bandwidth per provider\n"
    "  verify      run the property suites and print a pass/fail report\n"
    "\n"
    "--scenario accepts a key=value file or a built-in name:\n"
    "  symmetric_small_ab, symmetric_large_ab,\n"
    "  asymmetric_small_ab, asymmetric_large_ab\n";

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string subcommand;
  std::string scenario;
  std::string out_path; // empty: standard output
};

Options parse_args(const std::vector<std::string>& args) {
  if (args.empty()) {
    throw CliError("missing subcommand");
  }
  Options opt;
  opt.subcommand = args[0];
  if (opt.subcommand != "solve" && opt.subcommand != "sweep" &&
      opt.subcommand != "thresholds" && opt.subcommand != "verify") {
    throw CliError("unknown subcommand '" + opt.subcommand + "'");
  }
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& arg = args[i];
    const auto value = [&]() -> const std::string& {
      if (i + 1 >= args.size()) {
        throw CliError(arg + " needs a value");
      }
      return args[++i];
    };
    if (arg == "--scenario") {
      opt.scenario = value();
    } else if (arg == "--out") {
      opt.out_path = value();
    } else {
      throw CliError("unknown option '" + arg + "'");
    }
  }
  if (opt.scenario.empty()) {
    throw CliError("--scenario is required");
  }
  return opt;
}

ScenarioFile load_scenario(const std::string& ref) {
  std::error_code ec;
  if (std::filesystem::exists(ref, ec)) {
    std::ifstream in(ref, std::ios::binary);
    if (!in) {
      throw ScenarioError("cannot read scenario file '" + ref + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
  }
  if (const ScenarioFile* builtin = find_builtin(ref)) {
    return *builtin;
  }
  throw ScenarioError("scenario '" + ref +
                      "' is neither a file nor a built-in name");
}

void write_output(const Options& opt, std::ostream& out,
                  const std::string& data) {
  if (opt.out_path.empty()) {
    out << data;
    return;
  }
  std::ofstream file(opt.out_path, std::ios::binary);
  if (!file) {
    throw CliError("cannot open output file '" + opt.out_path + "'");
  }
  file << data;
}

std::string fixed6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string brief(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", value);
  return buf;
}

int cmd_solve(const Options& opt, std::ostream& out) {
  const ScenarioFile scenario = load_scenario(opt.scenario);
  const MarketConfig cfg = scenario.config();
  std::optional<EquilibriumResult> primary;
  std::optional<EquilibriumResult> coop;
  switch (scenario.mode) {
  case Mode::kCompetition:
    primary = solve_numeric(cfg);
    break;
  case Mode::kCooperation:
    primary = solve_cooperation(cfg);
    break;
  case Mode::kBoth:
    primary = solve_numeric(cfg);
    coop = solve_cooperation(cfg);
    break;
  }
  write_output(opt, out,
               emit_solve_json(cfg.bandwidth, *primary,
                               coop ? &*coop : nullptr));
  return 0;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const ScenarioFile scenario = load_scenario(opt.scenario);
  const SweepTable table = sweep(scenario.sweep_spec());
  write_output(opt, out, emit_sweep_csv(table, scenario.mode));
  return 0;
}

int cmd_thresholds(const Options& opt, std::ostream& out) {
  const ScenarioFile scenario = load_scenario(opt.scenario);
  SweepSpec spec = scenario.sweep_spec();
  spec.include_cooperation = false; // cooperation never enters the overlap
  const SweepTable table = sweep(spec);
  std::string line;
  for (int sp = 1; sp <= 2; ++sp) {
    if (sp == 2) line += ' ';
    line += "SP" + std::to_string(sp) + ": ";
    const EntryThreshold* found = nullptr;
    for (const EntryThreshold& t : table.thresholds) {
      if (t.sp == sp) found = &t;
    }
    line += found ? fixed6(found->w_star) : "none";
  }
  write_output(opt, out, line + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// verify: property suites over the scenario's configuration

struct Report {
  std::string text;
  bool ok = true;

  void line(const std::string& name, bool pass, const std::string& detail) {
    text += name + ": " + detail + (pass ? "  PASS" : "  FAIL") + "\n";
    ok = ok && pass;
  }
  void info(const std::string& name, const std::string& detail) {
    text += name + ": " + detail + "  (reported)\n";
  }
};

std::vector<double> sample_bandwidths(const ScenarioFile& scenario) {
  if (scenario.w) {
    return {*scenario.w};
  }
  const SweepRange& r = *scenario.range;
  return {r.w_min, r.w_min + 0.25 * (r.w_max - r.w_min),
          0.5 * (r.w_min + r.w_max), r.w_min + 0.75 * (r.w_max - r.w_min),
          r.w_max};
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_potential_identity(Report& report, const ScenarioFile& scenario,
                              const std::vector<double>& ws) {
  if (scenario.size_a <= 0.0 || scenario.size_ab <= 0.0 ||
      scenario.size_b <= 0.0) {
    report.info("potential-identity", "skipped: degenerate sub-market");
    return;
  }
  std::mt19937_64 rng(0x5eedf00d);
  double max_gap = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const MarketConfig cfg{scenario.size_a, scenario.size_ab, scenario.size_b,
                           ws[t % ws.size()]};
    const Allocation from = random_feasible(cfg, rng);
    Allocation to = from;
    const int sp = t % 2 + 1;
    if (sp == 1) {
      to.sp1_dedicated = unit(rng) * cfg.size_a;
      to.sp1_overlap = unit(rng) * (cfg.size_ab - from.sp2_overlap);
    } else {
      to.sp2_dedicated = unit(rng) * cfg.size_b;
      to.sp2_overlap = unit(rng) * (cfg.size_ab - from.sp1_overlap);
    }
    max_gap = std::max(max_gap, potential_identity_gap(from, to, sp, cfg));
  }
  report.line("potential-identity", max_gap <= 1e-12,
              "max |dPhi - dR| = " + brief(max_gap) + " over " +
                  std::to_string(trials) + " unilateral deviations");
}

void check_definiteness(Report& report, const ScenarioFile& scenario,
                        const std::vector<double>& ws) {
  if (scenario.size_a <= 0.0 || scenario.size_ab <= 0.0 ||
      scenario.size_b <= 0.0) {
    report.info("positive-definite", "skipped: degenerate sub-market");
    return;
  }
  // Definiteness holds for symmetric dedicated markets once the bandwidth
  // reaches the overlap-entry point; below it the quadratic form can be
  // indefinite, so those samples are recorded rather than asserted.
  const double w_entry = 0.5 * std::max(scenario.size_a, scenario.size_b);
  int pd_above = 0, n_above = 0, pd_below = 0, n_below = 0;
  for (double w : ws) {
    const MarketConfig cfg{scenario.size_a, scenario.size_ab, scenario.size_b,
                           w};
    const bool pd = is_positive_definite(build_form(cfg));
    if (w >= w_entry) {
      ++n_above;
      pd_above += pd;
    } else {
      ++n_below;
      pd_below += pd;
    }
  }
  std::string detail = std::to_string(pd_above) + "/" +
                       std::to_string(n_above) + " definite at W >= " +
                       brief(w_entry);
  if (n_below > 0) {
    detail += "; below: " + std::to_string(pd_below) + "/" +
              std::to_string(n_below) + " (recorded only)";
  }
  const bool symmetric = std::abs(scenario.size_a - scenario.size_b) <= 1e-12;
  if (symmetric) {
    report.line("positive-definite", pd_above == n_above, detail);
  } else {
    // Only the symmetric case carries a definiteness guarantee.
    report.info("positive-definite (asymmetric)", detail);
  }
}

void check_boundary_deviations(Report& report, const ScenarioFile& scenario,
                            const std::vector<double>& ws) {
  if (scenario.size_a <= 0.0 || scenario.size_ab <= 0.0 ||
      scenario.size_b <= 0.0) {
    report.info("boundary-deviation", "skipped: degenerate sub-market");
    return;
  }
  std::mt19937_64 rng(0xfeedbeef);
  const int per_pattern = 100;

  int found1 = 0;
  for (int t = 0; t < per_pattern; ++t) {
    const MarketConfig cfg{scenario.size_a, scenario.size_ab, scenario.size_b,
                           ws[t % ws.size()]};
    Allocation x = random_feasible(cfg, rng);
    const int sp = t % 2 + 1;
    double& dedicated = sp == 1 ? x.sp1_dedicated : x.sp2_dedicated;
    double& overlap = sp == 1 ? x.sp1_overlap : x.sp2_overlap;
    const double other_overlap = sp == 1 ? x.sp2_overlap : x.sp1_overlap;
    dedicated = 0.0;
    if (overlap <= kEntryTol) {
      overlap = 0.5 * (cfg.size_ab - other_overlap);
    }
    const auto finding = boundary_deviation(x, cfg);
    if (finding && std::holds_alternative<ProfitableDeviation>(*finding) &&
        std::get<ProfitableDeviation>(*finding).revenue_gain > 0.0) {
      ++found1;
    }
  }

  int found2 = 0;
  for (int t = 0; t < per_pattern; ++t) {
    const MarketConfig cfg{scenario.size_a, scenario.size_ab, scenario.size_b,
                           ws[t % ws.size()]};
    Allocation x = random_feasible(cfg, rng);
    const int sp = t % 2 + 1;
    if (sp == 1) {
      x.sp1_dedicated = 0.0;
      x.sp1_overlap = 0.0;
      // A provider can profitably enter only if the opponent's overlap
      // traffic leaves bandwidth headroom, as it must at any equilibrium.
      x.sp2_overlap = std::min(x.sp2_overlap, 0.9 * cfg.bandwidth);
    } else {
      x.sp2_dedicated = 0.0;
      x.sp2_overlap = 0.0;
      x.sp1_overlap = std::min(x.sp1_overlap, 0.9 * cfg.bandwidth);
    }
    const auto finding = boundary_deviation(x, cfg);
    if (finding && std::holds_alternative<ProfitableDeviation>(*finding) &&
        std::get<ProfitableDeviation>(*finding).revenue_gain > 0.0) {
      ++found2;
    }
  }

  report.line("boundary-deviation (overlap-only profile)",
              found1 == per_pattern,
              std::to_string(found1) + "/" + std::to_string(per_pattern) +
                  " strictly profitable deviations");
  report.line("boundary-deviation (idle provider)", found2 == per_pattern,
              std::to_string(found2) + "/" + std::to_string(per_pattern) +
                  " strictly profitable deviations");
}

void check_squeeze_out(Report& report, const ScenarioFile& scenario) {
  if (scenario.size_a <= 0.0 || scenario.size_ab <= 0.0 ||
      scenario.size_b <= 0.0) {
    report.info("overlap-squeeze-out", "skipped: degenerate sub-market");
    return;
  }
  const double w_top = 0.5 * std::min(scenario.size_a, scenario.size_b);
  std::mt19937_64 rng(0xc0ffee);
  int negative = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    // Bandwidths below the overlap-entry range, where the squeeze-out
    // boundary must be stationary-infeasible.
    const MarketConfig cfg{scenario.size_a, scenario.size_ab, scenario.size_b,
                           w_top * (0.05 + 0.9 * unit(rng))};
    Allocation x;
    x.sp1_dedicated = 0.5 * cfg.size_a;
    x.sp2_dedicated = 0.5 * cfg.size_b;
    if (t % 2 == 0) {
      x.sp2_overlap = 0.5 * cfg.size_ab;
    } else {
      x.sp1_overlap = 0.5 * cfg.size_ab;
    }
    const auto finding = boundary_deviation(x, cfg);
    if (finding && std::holds_alternative<FocInfeasibility>(*finding) &&
        std::get<FocInfeasibility>(*finding).cross_product < 0.0) {
      ++negative;
    }
  }
  const std::string detail =
      std::to_string(negative) + "/" + std::to_string(trials) +
      " boundary systems with a negative cross product (W below " +
      brief(w_top) + ")";
  if (std::abs(scenario.size_a - scenario.size_b) <= 1e-12) {
    report.line("overlap-squeeze-out", negative == trials, detail);
  } else {
    report.info("overlap-squeeze-out (asymmetric)", detail);
  }
}

void check_uniqueness(Report& report, const ScenarioFile& scenario,
                      const std::vector<double>& ws) {
  double max_spread = 0.0;
  double max_residual = 0.0;
  bool all_converged = true;
  for (double w : ws) {
    const MarketConfig cfg{scenario.size_a, scenario.size_ab, scenario.size_b,
                           w};
    const ProbeResult probe = multistart_probe(cfg, 50, 0xab5eed);
    max_spread = std::max(max_spread, probe.max_pairwise_distance);
    max_residual = std::max(max_residual, probe.max_residual);
    all_converged = all_converged && probe.all_converged;
  }
  report.line("uniqueness (multi-start)",
              all_converged && max_spread <= 1e-7 && max_residual <= 1e-8,
              "max spread " + brief(max_spread) + ", max residual " +
                  brief(max_residual) + " over 50 starts x " +
                  std::to_string(ws.size()) + " bandwidths");
}

int cmd_verify(const Options& opt, std::ostream& out) {
  const ScenarioFile scenario = load_scenario(opt.scenario);
  const std::vector<double> ws = sample_bandwidths(scenario);
  Report report;
  check_potential_identity(report, scenario, ws);
  check_definiteness(report, scenario, ws);
  check_boundary_deviations(report, scenario, ws);
  check_squeeze_out(report, scenario);
  check_uniqueness(report, scenario, ws);
  report.text += report.ok ? "all checks passed\n" : "some checks FAILED\n";
  write_output(opt, out, report.text);
  return report.ok ? 0 : 2;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  try {
    const Options opt = parse_args(args);
    if (opt.subcommand == "solve") return cmd_solve(opt, out);
    if (opt.subcommand == "sweep") return cmd_sweep(opt, out);
    if (opt.subcommand == "thresholds") return cmd_thresholds(opt, out);
    return cmd_verify(opt, out);
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n" << kUsage;
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace spshare
