#include "spshare/market.hpp"

#include <cmath>

namespace spshare {

void MarketConfig::validate() const {
  if (!(bandwidth > 0.0)) {
    throw ConfigError("bandwidth must be positive");
  }
  if (size_a < 0.0 || size_ab < 0.0 || size_b < 0.0) {
    throw ConfigError("sub-market sizes must be nonnegative");
  }
  const double sum = size_a + size_ab + size_b;
  if (std::abs(sum - 1.0) > kSizeSumTol) {
    throw ConfigError("sub-market sizes must sum to 1, got " +
                      std::to_string(sum));
  }
}

bool MarketConfig::symmetric(double tol) const {
  return std::abs(size_a - size_b) <= tol;
}

namespace {

// Clamps q into [lo, hi]; violations beyond kFeasibilityTol are reported as
// a violation of the numbered coverage constraint.
double clamp_or_throw(double q, double lo, double hi, const char* what) {
  if (q < lo) {
    if (q < lo - kFeasibilityTol) {
      throw FeasibilityError(std::string("allocation violates constraint ") +
                             what);
    }
    return lo;
  }
  if (q > hi) {
    if (q > hi + kFeasibilityTol) {
      throw FeasibilityError(std::string("allocation violates constraint ") +
                             what);
    }
    return hi;
  }
  return q;
}

} // namespace

Allocation clamp_feasible(const Allocation& alloc, const MarketConfig& cfg) {
  Allocation out;
  out.sp1_dedicated =
      clamp_or_throw(alloc.sp1_dedicated, 0.0, cfg.size_a, "(1)");
  out.sp2_dedicated =
      clamp_or_throw(alloc.sp2_dedicated, 0.0, cfg.size_b, "(3)");
  out.sp1_overlap = clamp_or_throw(alloc.sp1_overlap, 0.0, cfg.size_ab, "(2)");
  out.sp2_overlap = clamp_or_throw(alloc.sp2_overlap, 0.0, cfg.size_ab, "(2)");
  const double joint = out.sp1_overlap + out.sp2_overlap;
  if (joint > cfg.size_ab) {
    if (joint > cfg.size_ab + kFeasibilityTol) {
      throw FeasibilityError("allocation violates constraint (2)");
    }
    // Scale both overlap quantities back onto the boundary.
    const double scale = cfg.size_ab / joint;
    out.sp1_overlap *= scale;
    out.sp2_overlap *= scale;
  }
  return out;
}

bool is_feasible(const Allocation& alloc, const MarketConfig& cfg) {
  try {
    clamp_feasible(alloc, cfg);
    return true;
  } catch (const FeasibilityError&) {
    return false;
  }
}

Prices delivered_prices(const Allocation& alloc, const MarketConfig& cfg) {
  const Allocation x = clamp_feasible(alloc, cfg);
  Prices p;
  p.a = cfg.size_a > 0.0 ? 1.0 - x.sp1_dedicated / cfg.size_a : 1.0;
  p.ab = cfg.size_ab > 0.0
             ? 1.0 - (x.sp1_overlap + x.sp2_overlap) / cfg.size_ab
             : 1.0;
  p.b = cfg.size_b > 0.0 ? 1.0 - x.sp2_dedicated / cfg.size_b : 1.0;
  return p;
}

Latencies latency_costs(const Allocation& alloc, const MarketConfig& cfg) {
  if (!(cfg.bandwidth > 0.0)) {
    throw ConfigError("bandwidth must be positive");
  }
  const Allocation x = clamp_feasible(alloc, cfg);
  const double w = cfg.bandwidth;
  const double overlap = x.sp1_overlap + x.sp2_overlap;
  Latencies l;
  l.a = (x.sp1_dedicated + overlap) / w;
  l.ab = (x.sp1_dedicated + overlap + x.sp2_dedicated) / w;
  l.b = (overlap + x.sp2_dedicated) / w;
  return l;
}

Revenues revenues(const Allocation& alloc, const MarketConfig& cfg) {
  const Allocation x = clamp_feasible(alloc, cfg);
  const Prices p = delivered_prices(x, cfg);
  const Latencies l = latency_costs(x, cfg);
  Revenues r;
  r.sp1 = x.sp1_dedicated * (p.a - l.a) + x.sp1_overlap * (p.ab - l.ab);
  r.sp2 = x.sp2_dedicated * (p.b - l.b) + x.sp2_overlap * (p.ab - l.ab);
  return r;
}

Surplus consumer_surplus(const Allocation& alloc, const MarketConfig& cfg) {
  const Allocation x = clamp_feasible(alloc, cfg);
  Surplus cs;
  cs.a = cfg.size_a > 0.0
             ? x.sp1_dedicated * x.sp1_dedicated / (2.0 * cfg.size_a)
             : 0.0;
  const double overlap = x.sp1_overlap + x.sp2_overlap;
  cs.ab = cfg.size_ab > 0.0 ? overlap * overlap / (2.0 * cfg.size_ab) : 0.0;
  cs.b = cfg.size_b > 0.0
             ? x.sp2_dedicated * x.sp2_dedicated / (2.0 * cfg.size_b)
             : 0.0;
  cs.total = cs.a + cs.ab + cs.b;
  return cs;
}

MarketOutcome evaluate(const Allocation& alloc, const MarketConfig& cfg) {
  const Allocation x = clamp_feasible(alloc, cfg);
  MarketOutcome out;
  out.price = delivered_prices(x, cfg);
  out.latency = latency_costs(x, cfg);
  out.service_a = out.price.a - out.latency.a;
  out.service_ab = out.price.ab - out.latency.ab;
  out.service_b = out.price.b - out.latency.b;
  out.revenue.sp1 = x.sp1_dedicated * out.service_a +
                    x.sp1_overlap * out.service_ab;
  out.revenue.sp2 = x.sp2_dedicated * out.service_b +
                    x.sp2_overlap * out.service_ab;
  out.surplus = consumer_surplus(x, cfg);
  out.welfare = out.surplus.total + out.revenue.sp1 + out.revenue.sp2;
  return out;
}

} // namespace spshare
