#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spshare/equilibrium.hpp"
#include "spshare/market.hpp"

namespace spshare {

/// Bandwidth sweep request: fixed sub-market sizes, a W grid, and optionally
/// the cooperation counterfactual alongside the equilibrium at every point.
struct SweepSpec {
  double size_a = 0.0;
  double size_ab = 0.0;
  double size_b = 0.0;
  double w_min = 0.0;
  double w_max = 0.0;
  double w_step = 0.0;
  bool include_cooperation = false;

  void validate() const;
  std::size_t row_count() const;
  double w_at(std::size_t i) const;
  MarketConfig config_at(double w) const;
};

struct SweepRow {
  double w = 0.0;
  EquilibriumResult competition;
  std::optional<EquilibriumResult> cooperation;
};

/// Smallest bandwidth at which a provider serves a positive quantity in the
/// overlap, refined by bisection between the bracketing grid points.
struct EntryThreshold {
  int sp = 0;
  double w_star = 0.0;
};

struct SweepTable {
  SweepSpec spec;
  std::vector<SweepRow> rows; ///< strictly increasing in w
  std::vector<EntryThreshold> thresholds;
};

/// Runs the sweep, one independent solve per grid point.  Rows are computed
/// in parallel with OpenMP when available; output is W-ordered and identical
/// to sweep_serial regardless of thread count.  A solver failure aborts the
/// sweep naming the offending W.
SweepTable sweep(const SweepSpec& spec);

/// Serial reference implementation.
SweepTable sweep_serial(const SweepSpec& spec);

enum class Metric {
  kRevenueTotal,
  kSurplusTotal,
  kWelfare,
  kRevenueSp1,
  kRevenueSp2,
};

/// Closed W-interval of consecutive grid points.
struct WInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Maximal intervals over which the metric of the equilibrium (competition)
/// result strictly decreases between consecutive rows, beyond a 1e-12 noise
/// floor.  Empty for metrics that only grow with bandwidth.
std::vector<WInterval> monotonicity_report(const SweepTable& table,
                                           Metric metric);

struct ComparisonRow {
  double w = 0.0;
  double comp_r1 = 0.0, comp_r2 = 0.0, comp_revenue = 0.0;
  double comp_surplus = 0.0, comp_welfare = 0.0;
  double coop_r1 = 0.0, coop_r2 = 0.0, coop_revenue = 0.0;
  double coop_surplus = 0.0, coop_welfare = 0.0;
};

/// Competition-versus-cooperation comparison across the sweep.  The interval
/// lists flag where cooperation strictly dominates (per the same 1e-12 noise
/// floor): both providers' revenues at once, total revenue, total consumer
/// surplus, and welfare.
struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::vector<WInterval> coop_better_each_revenue;
  std::vector<WInterval> coop_better_total_revenue;
  std::vector<WInterval> coop_better_total_surplus;
  std::vector<WInterval> coop_better_welfare;
};

/// Requires a table built with include_cooperation.
ComparisonReport compare_cooperation(const SweepTable& table);

} // namespace spshare
