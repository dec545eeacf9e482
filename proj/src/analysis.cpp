#include "spshare/analysis.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>

namespace spshare {

namespace {

constexpr double kNoiseFloor = 1e-12;
constexpr double kThresholdWidth = 1e-8; // bisection bracket width in W

} // namespace

void SweepSpec::validate() const {
  MarketConfig{size_a, size_ab, size_b, 1.0}.validate();
  if (!(w_min > 0.0)) {
    throw ConfigError("w_min must be positive");
  }
  if (w_min > w_max) {
    throw ConfigError("w_min must not exceed w_max");
  }
  if (!(w_step > 0.0)) {
    throw ConfigError("w_step must be positive");
  }
  if ((w_max - w_min) / w_step > 1e6) {
    throw ConfigError("sweep grid exceeds 1e6 rows");
  }
}

std::size_t SweepSpec::row_count() const {
  const double span = (w_max - w_min) / w_step;
  // w_max itself is a row when it sits (up to rounding) a whole number of
  // steps from w_min.
  const double snapped = std::round(span);
  if (std::abs(span - snapped) * w_step <= 1e-9) {
    return static_cast<std::size_t>(snapped) + 1;
  }
  return static_cast<std::size_t>(std::floor(span)) + 1;
}

double SweepSpec::w_at(std::size_t i) const {
  return w_min + static_cast<double>(i) * w_step;
}

MarketConfig SweepSpec::config_at(double w) const {
  return MarketConfig{size_a, size_ab, size_b, w};
}

namespace {

SweepRow compute_row(const SweepSpec& spec, double w) {
  SweepRow row;
  row.w = w;
  try {
    row.competition = solve_numeric(spec.config_at(w));
  } catch (const SolverError& e) {
    throw SolverError("sweep failed at W=" + std::to_string(w) + ": " +
                          e.what(),
                      e.last_iterate, e.residual, e.iterations);
  }
  if (spec.include_cooperation) {
    row.cooperation = solve_cooperation(spec.config_at(w));
  }
  return row;
}

double overlap_of(int sp, const EquilibriumResult& res) {
  return sp == 1 ? res.alloc.sp1_overlap : res.alloc.sp2_overlap;
}

bool entered(int sp, const EquilibriumResult& res) {
  return overlap_of(sp, res) > kEntryTol;
}

// Refines the entry bandwidth inside (w_lo, w_hi], where the provider is out
// of the overlap at w_lo and in at w_hi.
double refine_threshold(const SweepSpec& spec, int sp, double w_lo,
                        double w_hi) {
  while (w_hi - w_lo > kThresholdWidth) {
    const double mid = 0.5 * (w_lo + w_hi);
    if (entered(sp, solve_numeric(spec.config_at(mid)))) {
      w_hi = mid;
    } else {
      w_lo = mid;
    }
  }
  return 0.5 * (w_lo + w_hi);
}

void detect_thresholds(SweepTable& table) {
  const auto& rows = table.rows;
  if (rows.empty()) return;
  for (int sp = 1; sp <= 2; ++sp) {
    if (entered(sp, rows.front().competition)) {
      // Already in the overlap at the start of the grid.
      table.thresholds.push_back({sp, rows.front().w});
      continue;
    }
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (!entered(sp, rows[i].competition) &&
          entered(sp, rows[i + 1].competition)) {
        table.thresholds.push_back(
            {sp, refine_threshold(table.spec, sp, rows[i].w, rows[i + 1].w)});
        break;
      }
    }
  }
}

} // namespace

SweepTable sweep_serial(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  table.spec = spec;
  const std::size_t n = spec.row_count();
  table.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    table.rows.push_back(compute_row(spec, spec.w_at(i)));
  }
  detect_thresholds(table);
  return table;
}

SweepTable sweep(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  table.spec = spec;
  const std::size_t n = spec.row_count();
  table.rows.resize(n);
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    try {
      table.rows[static_cast<std::size_t>(i)] =
          compute_row(spec, spec.w_at(static_cast<std::size_t>(i)));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  detect_thresholds(table);
  return table;
}

namespace {

double metric_of(const EquilibriumResult& res, Metric metric) {
  switch (metric) {
  case Metric::kRevenueTotal:
    return res.outcome.revenue.sp1 + res.outcome.revenue.sp2;
  case Metric::kSurplusTotal:
    return res.outcome.surplus.total;
  case Metric::kWelfare:
    return res.outcome.welfare;
  case Metric::kRevenueSp1:
    return res.outcome.revenue.sp1;
  case Metric::kRevenueSp2:
    return res.outcome.revenue.sp2;
  }
  throw std::invalid_argument("unknown metric");
}

// Merges consecutive grid points where `flag` holds into maximal closed
// intervals [w_first, w_last].
template <typename Flag>
std::vector<WInterval> merge_intervals(const std::vector<SweepRow>& rows,
                                       std::size_t count, Flag flag) {
  std::vector<WInterval> out;
  std::size_t i = 0;
  while (i < count) {
    if (!flag(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < count && flag(j + 1)) ++j;
    out.push_back({rows[i].w, rows[j].w});
    i = j + 1;
  }
  return out;
}

} // namespace

std::vector<WInterval> monotonicity_report(const SweepTable& table,
                                           Metric metric) {
  const auto& rows = table.rows;
  if (rows.size() < 2) {
    throw std::invalid_argument("monotonicity report needs at least two rows");
  }
  std::vector<WInterval> out;
  std::size_t i = 0;
  while (i + 1 < rows.size()) {
    if (!(metric_of(rows[i + 1].competition, metric) <
          metric_of(rows[i].competition, metric) - kNoiseFloor)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < rows.size() &&
           metric_of(rows[j + 1].competition, metric) <
               metric_of(rows[j].competition, metric) - kNoiseFloor) {
      ++j;
    }
    out.push_back({rows[i].w, rows[j].w});
    i = j;
  }
  return out;
}

ComparisonReport compare_cooperation(const SweepTable& table) {
  if (!table.spec.include_cooperation) {
    throw std::invalid_argument(
        "comparison requires a sweep built with cooperation included");
  }
  ComparisonReport report;
  report.rows.reserve(table.rows.size());
  for (const SweepRow& row : table.rows) {
    if (!row.cooperation) {
      throw std::invalid_argument("sweep row missing cooperation result");
    }
    ComparisonRow c;
    c.w = row.w;
    const MarketOutcome& comp = row.competition.outcome;
    const MarketOutcome& coop = row.cooperation->outcome;
    c.comp_r1 = comp.revenue.sp1;
    c.comp_r2 = comp.revenue.sp2;
    c.comp_revenue = comp.revenue.sp1 + comp.revenue.sp2;
    c.comp_surplus = comp.surplus.total;
    c.comp_welfare = comp.welfare;
    c.coop_r1 = coop.revenue.sp1;
    c.coop_r2 = coop.revenue.sp2;
    c.coop_revenue = coop.revenue.sp1 + coop.revenue.sp2;
    c.coop_surplus = coop.surplus.total;
    c.coop_welfare = coop.welfare;
    report.rows.push_back(c);
  }

  const auto& rows = report.rows;
  const auto better = [](double coop, double comp) {
    return coop > comp + kNoiseFloor;
  };
  report.coop_better_each_revenue =
      merge_intervals(table.rows, rows.size(), [&](std::size_t i) {
        return better(rows[i].coop_r1, rows[i].comp_r1) &&
               better(rows[i].coop_r2, rows[i].comp_r2);
      });
  report.coop_better_total_revenue =
      merge_intervals(table.rows, rows.size(), [&](std::size_t i) {
        return better(rows[i].coop_revenue, rows[i].comp_revenue);
      });
  report.coop_better_total_surplus =
      merge_intervals(table.rows, rows.size(), [&](std::size_t i) {
        return better(rows[i].coop_surplus, rows[i].comp_surplus);
      });
  report.coop_better_welfare =
      merge_intervals(table.rows, rows.size(), [&](std::size_t i) {
        return better(rows[i].coop_welfare, rows[i].comp_welfare);
      });
  return report;
}

} // namespace spshare
