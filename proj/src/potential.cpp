#include "spshare/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace spshare {

PotentialForm build_form(const MarketConfig& cfg) {
  if (!(cfg.bandwidth > 0.0)) {
    throw ConfigError("bandwidth must be positive");
  }
  if (!(cfg.size_a > 0.0) || !(cfg.size_ab > 0.0) || !(cfg.size_b > 0.0)) {
    throw ConfigError("potential form requires positive sub-market sizes");
  }
  const double inv_w = 1.0 / cfg.bandwidth;
  const double inv_a = 1.0 / cfg.size_a;
  const double inv_ab = 1.0 / cfg.size_ab;
  const double inv_b = 1.0 / cfg.size_b;

  PotentialForm f;
  auto& q = f.coeff;
  q[0][0] = inv_a + inv_w;
  q[1][1] = inv_ab + inv_w;
  q[2][2] = inv_ab + inv_w;
  q[3][3] = inv_b + inv_w;
  q[0][1] = q[1][0] = inv_w;
  q[0][2] = q[2][0] = 0.5 * inv_w;
  q[0][3] = q[3][0] = 0.0;
  q[1][2] = q[2][1] = 0.5 * inv_ab + 0.5 * inv_w;
  q[1][3] = q[3][1] = 0.5 * inv_w;
  q[2][3] = q[3][2] = inv_w;
  return f;
}

double potential_value(const Allocation& alloc, const MarketConfig& cfg) {
  const PotentialForm f = build_form(cfg);
  const std::array<double, 4> x = {alloc.sp1_dedicated, alloc.sp1_overlap,
                                   alloc.sp2_overlap, alloc.sp2_dedicated};
  double quad = 0.0;
  double lin = 0.0;
  for (int i = 0; i < 4; ++i) {
    lin += x[i];
    for (int j = 0; j < 4; ++j) {
      quad += x[i] * f.coeff[i][j] * x[j];
    }
  }
  return -quad + lin;
}

bool is_positive_definite(const PotentialForm& form) {
  constexpr double kPivotTol = 1e-12;
  std::array<std::array<double, 4>, 4> a = form.coeff;
  for (int k = 0; k < 4; ++k) {
    if (!(a[k][k] > kPivotTol)) {
      return false;
    }
    for (int i = k + 1; i < 4; ++i) {
      const double factor = a[i][k] / a[k][k];
      for (int j = k; j < 4; ++j) {
        a[i][j] -= factor * a[k][j];
      }
    }
  }
  return true;
}

double potential_identity_gap(const Allocation& from, const Allocation& to,
                              int sp, const MarketConfig& cfg) {
  if (sp != 1 && sp != 2) {
    throw std::invalid_argument("sp must be 1 or 2");
  }
  const bool sp1_moved = from.sp1_dedicated != to.sp1_dedicated ||
                         from.sp1_overlap != to.sp1_overlap;
  const bool sp2_moved = from.sp2_dedicated != to.sp2_dedicated ||
                         from.sp2_overlap != to.sp2_overlap;
  if ((sp == 1 && sp2_moved) || (sp == 2 && sp1_moved)) {
    throw std::invalid_argument(
        "deviation must change only the chosen provider's quantities");
  }
  const double d_phi = potential_value(to, cfg) - potential_value(from, cfg);
  const Revenues r_from = revenues(from, cfg);
  const Revenues r_to = revenues(to, cfg);
  const double d_rev =
      sp == 1 ? r_to.sp1 - r_from.sp1 : r_to.sp2 - r_from.sp2;
  return std::abs(d_phi - d_rev);
}

} // namespace spshare
