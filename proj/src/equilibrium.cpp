#include "spshare/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <vector>

namespace spshare {

const char* to_string(Regime regime) {
  switch (regime) {
  case Regime::kDedicatedOnly:
    return "dedicated_only";
  case Regime::kSp1InOverlap:
    return "sp1_in_overlap";
  case Regime::kSp2InOverlap:
    return "sp2_in_overlap";
  case Regime::kBothInOverlap:
    return "both_in_overlap";
  }
  return "unknown";
}

const char* to_string(SolveMethod method) {
  switch (method) {
  case SolveMethod::kClosedFormSymmetric:
    return "closed_form_symmetric";
  case SolveMethod::kNumericPotential:
    return "numeric_potential";
  case SolveMethod::kCooperation:
    return "cooperation";
  }
  return "unknown";
}

Regime classify_regime(const Allocation& alloc) {
  const bool sp1_in = alloc.sp1_overlap > kEntryTol;
  const bool sp2_in = alloc.sp2_overlap > kEntryTol;
  if (sp1_in && sp2_in) return Regime::kBothInOverlap;
  if (sp1_in) return Regime::kSp1InOverlap;
  if (sp2_in) return Regime::kSp2InOverlap;
  return Regime::kDedicatedOnly;
}

namespace {

constexpr double kTieTol = 1e-14;

double revenue_of(int sp, const Allocation& alloc, const MarketConfig& cfg) {
  const Revenues r = revenues(alloc, cfg);
  return sp == 1 ? r.sp1 : r.sp2;
}

Allocation assemble(int sp, double dedicated, double overlap,
                    const BestResponseProblem& p) {
  Allocation a;
  if (sp == 1) {
    a.sp1_dedicated = dedicated;
    a.sp1_overlap = overlap;
    a.sp2_overlap = p.opponent_overlap;
    a.sp2_dedicated = p.opponent_dedicated;
  } else {
    a.sp2_dedicated = dedicated;
    a.sp2_overlap = overlap;
    a.sp1_overlap = p.opponent_overlap;
    a.sp1_dedicated = p.opponent_dedicated;
  }
  return a;
}

double bounded(double q, double lo, double hi, const char* what) {
  if (q < lo - kFeasibilityTol || q > hi + kFeasibilityTol) {
    throw FeasibilityError(std::string("infeasible opponent quantity: ") +
                           what);
  }
  return std::clamp(q, lo, hi);
}

} // namespace

BestResponse best_response(const BestResponseProblem& problem) {
  const MarketConfig& cfg = problem.cfg;
  cfg.validate();
  if (problem.sp != 1 && problem.sp != 2) {
    throw std::invalid_argument("sp must be 1 or 2");
  }

  const double m_own = problem.sp == 1 ? cfg.size_a : cfg.size_b;
  const double m_oth = problem.sp == 1 ? cfg.size_b : cfg.size_a;
  const double m_ab = cfg.size_ab;
  const double opp_ded =
      bounded(problem.opponent_dedicated, 0.0, m_oth, "dedicated");
  const double opp_ov = bounded(problem.opponent_overlap, 0.0, m_ab, "overlap");

  const double inv_w = 1.0 / cfg.bandwidth;
  const double u_max = m_own;
  const double v_max = std::max(0.0, m_ab - opp_ov);
  const bool has_u = u_max > 0.0;
  const bool has_v = v_max > 0.0;

  // Own revenue as a strictly concave quadratic in (dedicated, overlap):
  //   f(u, v) = a_u u + a_v v - q_uu u^2 - q_vv v^2 - q_uv u v
  const double a_u = 1.0 - opp_ov * inv_w;
  const double q_uv = 2.0 * inv_w;
  const double q_uu = has_u ? 1.0 / m_own + inv_w : 0.0;
  const double q_vv = m_ab > 0.0 ? 1.0 / m_ab + inv_w : 0.0;
  const double a_v =
      m_ab > 0.0 ? 1.0 - (1.0 / m_ab + inv_w) * opp_ov - opp_ded * inv_w
                 : 0.0;

  const auto objective = [&](double u, double v) {
    return a_u * u + a_v * v - q_uu * u * u - q_vv * v * v - q_uv * u * v;
  };

  struct Candidate {
    double u, v, value;
    int active; // number of box constraints pinning the candidate
  };
  std::vector<Candidate> candidates;
  candidates.reserve(9);
  const auto consider = [&](double u, double v, int active) {
    if (u < -1e-12 || u > u_max + 1e-12 || v < -1e-12 || v > v_max + 1e-12) {
      return;
    }
    u = std::clamp(u, 0.0, u_max);
    v = std::clamp(v, 0.0, v_max);
    candidates.push_back({u, v, objective(u, v), active});
  };

  consider(0.0, 0.0, 2);
  if (has_u) consider(u_max, 0.0, 2);
  if (has_v) consider(0.0, v_max, 2);
  if (has_u && has_v) consider(u_max, v_max, 2);
  if (has_u) {
    consider((a_u - q_uv * 0.0) / (2.0 * q_uu), 0.0, 1);
    if (has_v) consider((a_u - q_uv * v_max) / (2.0 * q_uu), v_max, 1);
  }
  if (has_v) {
    consider(0.0, (a_v - q_uv * 0.0) / (2.0 * q_vv), 1);
    if (has_u) consider(u_max, (a_v - q_uv * u_max) / (2.0 * q_vv), 1);
  }
  if (has_u && has_v) {
    // Joint stationary point: [2q_uu q_uv; q_uv 2q_vv] [u v]' = [a_u a_v]'.
    // The determinant is positive for any positive sizes and bandwidth.
    const double det = 4.0 * q_uu * q_vv - q_uv * q_uv;
    consider((2.0 * q_vv * a_u - q_uv * a_v) / det,
             (2.0 * q_uu * a_v - q_uv * a_u) / det, 0);
  }

  const Candidate* best = nullptr;
  for (const Candidate& c : candidates) {
    if (best == nullptr || c.value > best->value + kTieTol ||
        (c.value >= best->value - kTieTol && c.active < best->active)) {
      best = &c;
    }
  }

  BestResponse out;
  out.dedicated = best->u;
  out.overlap = best->v;
  out.value =
      revenue_of(problem.sp, assemble(problem.sp, best->u, best->v, problem),
                 cfg);
  return out;
}

double verify_nash(const Allocation& alloc, const MarketConfig& cfg) {
  const Allocation x = clamp_feasible(alloc, cfg);
  const Revenues r = revenues(x, cfg);
  const BestResponse b1 =
      best_response({1, x.sp2_dedicated, x.sp2_overlap, cfg});
  const BestResponse b2 =
      best_response({2, x.sp1_dedicated, x.sp1_overlap, cfg});
  return std::max(0.0, std::max(b1.value - r.sp1, b2.value - r.sp2));
}

namespace {

EquilibriumResult finish(const Allocation& alloc, const MarketConfig& cfg,
                         SolveMethod method, long iterations) {
  EquilibriumResult res;
  res.alloc = clamp_feasible(alloc, cfg);
  res.outcome = evaluate(res.alloc, cfg);
  res.regime = classify_regime(res.alloc);
  res.method = method;
  res.residual = verify_nash(res.alloc, cfg);
  res.iterations = iterations;
  return res;
}

} // namespace

EquilibriumResult closed_form_symmetric(const MarketConfig& cfg) {
  cfg.validate();
  if (!cfg.symmetric()) {
    throw NotApplicableError(
        "closed form requires size_a == size_b; use solve_numeric");
  }
  const double m = cfg.size_a;
  const double m_ab = cfg.size_ab;
  const double w = cfg.bandwidth;

  double dedicated;
  double overlap;
  if (w < 0.5 * m) {
    dedicated = w * m / (2.0 * (w + m));
    overlap = 0.0;
  } else {
    const double c = 2.0 * (w + m + m_ab) - m * m_ab / w;
    dedicated = w * m / c;
    overlap = (2.0 * w - m) * m_ab / (3.0 * c);
  }

  EquilibriumResult res =
      finish({dedicated, overlap, overlap, dedicated}, cfg,
             SolveMethod::kClosedFormSymmetric, 0);
  if (res.residual > kNashResidualTol) {
    throw SolverError("closed-form profile failed equilibrium verification",
                      res.alloc, res.residual, 0);
  }
  return res;
}

EquilibriumResult solve_numeric_from(const MarketConfig& cfg,
                                     const Allocation& start) {
  cfg.validate();
  Allocation x = clamp_feasible(start, cfg);
  long rounds = 0;
  bool converged = false;
  while (rounds < kMaxIterations) {
    const Allocation prev = x;
    const BestResponse b1 =
        best_response({1, x.sp2_dedicated, x.sp2_overlap, cfg});
    x.sp1_dedicated = b1.dedicated;
    x.sp1_overlap = b1.overlap;
    const BestResponse b2 =
        best_response({2, x.sp1_dedicated, x.sp1_overlap, cfg});
    x.sp2_dedicated = b2.dedicated;
    x.sp2_overlap = b2.overlap;
    ++rounds;

    const double step =
        std::max(std::max(std::abs(x.sp1_dedicated - prev.sp1_dedicated),
                          std::abs(x.sp1_overlap - prev.sp1_overlap)),
                 std::max(std::abs(x.sp2_overlap - prev.sp2_overlap),
                          std::abs(x.sp2_dedicated - prev.sp2_dedicated)));
    if (step < kStepTol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw SolverError("best-response iteration did not converge within " +
                          std::to_string(kMaxIterations) + " rounds",
                      x, verify_nash(x, cfg), rounds);
  }
  EquilibriumResult res =
      finish(x, cfg, SolveMethod::kNumericPotential, rounds);
  if (res.residual > kNashResidualTol) {
    throw SolverError("best-response limit failed equilibrium verification",
                      res.alloc, res.residual, rounds);
  }
  return res;
}

EquilibriumResult solve_numeric(const MarketConfig& cfg) {
  return solve_numeric_from(cfg, Allocation{});
}

EquilibriumResult solve_cooperation(const MarketConfig& cfg) {
  cfg.validate();
  const double w = cfg.bandwidth;
  Allocation x;
  x.sp1_dedicated =
      cfg.size_a > 0.0 ? w * cfg.size_a / (2.0 * (w + cfg.size_a)) : 0.0;
  x.sp2_dedicated =
      cfg.size_b > 0.0 ? w * cfg.size_b / (2.0 * (w + cfg.size_b)) : 0.0;
  EquilibriumResult res = finish(x, cfg, SolveMethod::kCooperation, 0);
  res.regime = Regime::kDedicatedOnly;
  return res;
}

namespace {

constexpr double kZeroTol = 1e-12;

// Halving search for a strictly profitable shift of size delta.  `apply`
// builds the deviated profile, `cap` bounds the first trial.
std::optional<ProfitableDeviation>
search_shift(BoundaryPattern pattern, int sp, const Allocation& from,
             const MarketConfig& cfg, double cap, const auto& apply) {
  if (!(cap > 0.0)) {
    return std::nullopt;
  }
  const double base = revenue_of(sp, from, cfg);
  for (double delta = std::min(1e-2, cap); delta > 1e-15; delta *= 0.5) {
    const Allocation dev = apply(delta);
    const double gain = revenue_of(sp, dev, cfg) - base;
    if (gain > 0.0) {
      return ProfitableDeviation{pattern, sp, dev, gain};
    }
  }
  return std::nullopt;
}

// Stationary system on the boundary where `squeezed_sp` serves nobody in the
// overlap: three linear equations in (own dedicated, other overlap, other
// dedicated).
FocInfeasibility solve_boundary_foc(int squeezed_sp, const MarketConfig& cfg) {
  const double m_own = squeezed_sp == 1 ? cfg.size_a : cfg.size_b;
  const double m_oth = squeezed_sp == 1 ? cfg.size_b : cfg.size_a;
  const double inv_w = 1.0 / cfg.bandwidth;
  const double inv_own = 1.0 / m_own;
  const double inv_oth = 1.0 / m_oth;
  const double inv_ab = 1.0 / cfg.size_ab;

  double m[3][4] = {
      {2.0 * (inv_own + inv_w), inv_w, 0.0, 1.0},
      {inv_w, 2.0 * (inv_ab + inv_w), 2.0 * inv_w, 1.0},
      {0.0, 2.0 * inv_w, 2.0 * (inv_oth + inv_w), 1.0},
  };
  // Gaussian elimination with partial pivoting.
  for (int k = 0; k < 3; ++k) {
    int pivot = k;
    for (int i = k + 1; i < 3; ++i) {
      if (std::abs(m[i][k]) > std::abs(m[pivot][k])) pivot = i;
    }
    std::swap(m[k], m[pivot]);
    if (std::abs(m[k][k]) < 1e-14) {
      throw std::runtime_error("singular boundary stationary system");
    }
    for (int i = k + 1; i < 3; ++i) {
      const double f = m[i][k] / m[k][k];
      for (int j = k; j < 4; ++j) m[i][j] -= f * m[k][j];
    }
  }
  double z[3];
  for (int i = 2; i >= 0; --i) {
    double s = m[i][3];
    for (int j = i + 1; j < 3; ++j) s -= m[i][j] * z[j];
    z[i] = s / m[i][i];
  }

  FocInfeasibility foc;
  foc.squeezed_sp = squeezed_sp;
  foc.own_dedicated = z[0];
  foc.other_overlap = z[1];
  foc.other_dedicated = z[2];
  foc.cross_product = z[0] * z[1];
  return foc;
}

} // namespace

std::optional<BoundaryFinding> boundary_deviation(const Allocation& alloc,
                                            const MarketConfig& cfg) {
  cfg.validate();
  const Allocation x = clamp_feasible(alloc, cfg);
  const auto zero = [](double q) { return q <= kZeroTol; };
  const auto pos = [](double q) { return q > kEntryTol; };

  // Dedicated quantity zero but overlap positive: move delta into the less
  // crowded dedicated sub-market.
  if (zero(x.sp1_dedicated) && pos(x.sp1_overlap)) {
    auto found = search_shift(BoundaryPattern::kOverlapOnly, 1, x, cfg,
                              std::min(cfg.size_a, x.sp1_overlap),
                              [&](double d) {
                                Allocation dev = x;
                                dev.sp1_dedicated = d;
                                dev.sp1_overlap = x.sp1_overlap - d;
                                return dev;
                              });
    if (found) return BoundaryFinding{*found};
  }
  if (zero(x.sp2_dedicated) && pos(x.sp2_overlap)) {
    auto found = search_shift(BoundaryPattern::kOverlapOnly, 2, x, cfg,
                              std::min(cfg.size_b, x.sp2_overlap),
                              [&](double d) {
                                Allocation dev = x;
                                dev.sp2_dedicated = d;
                                dev.sp2_overlap = x.sp2_overlap - d;
                                return dev;
                              });
    if (found) return BoundaryFinding{*found};
  }

  // Provider fully idle: enter the dedicated sub-market.
  if (zero(x.sp1_dedicated) && zero(x.sp1_overlap)) {
    auto found = search_shift(BoundaryPattern::kIdle, 1, x, cfg,
                              cfg.size_a, [&](double d) {
      Allocation dev = x;
      dev.sp1_dedicated = d;
      return dev;
    });
    if (found) return BoundaryFinding{*found};
  }
  if (zero(x.sp2_dedicated) && zero(x.sp2_overlap)) {
    auto found = search_shift(BoundaryPattern::kIdle, 2, x, cfg,
                              cfg.size_b, [&](double d) {
      Allocation dev = x;
      dev.sp2_dedicated = d;
      return dev;
    });
    if (found) return BoundaryFinding{*found};
  }

  // One provider squeezed out of the overlap: report the boundary
  // stationary system.
  const bool sizes_positive =
      cfg.size_a > 0.0 && cfg.size_ab > 0.0 && cfg.size_b > 0.0;
  if (sizes_positive && zero(x.sp1_overlap) && pos(x.sp2_overlap)) {
    return BoundaryFinding{solve_boundary_foc(1, cfg)};
  }
  if (sizes_positive && zero(x.sp2_overlap) && pos(x.sp1_overlap)) {
    return BoundaryFinding{solve_boundary_foc(2, cfg)};
  }

  return std::nullopt;
}

Allocation random_feasible(const MarketConfig& cfg, std::mt19937_64& rng) {
  // 53-bit uniform in [0, 1); identical streams on every standard library.
  const auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  Allocation a;
  a.sp1_dedicated = unit() * cfg.size_a;
  a.sp1_overlap = unit() * cfg.size_ab;
  a.sp2_overlap = unit() * (cfg.size_ab - a.sp1_overlap);
  a.sp2_dedicated = unit() * cfg.size_b;
  return a;
}

namespace {

double sup_distance(const Allocation& a, const Allocation& b) {
  return std::max(
      std::max(std::abs(a.sp1_dedicated - b.sp1_dedicated),
               std::abs(a.sp1_overlap - b.sp1_overlap)),
      std::max(std::abs(a.sp2_overlap - b.sp2_overlap),
               std::abs(a.sp2_dedicated - b.sp2_dedicated)));
}

std::mt19937_64 engine_for_start(std::uint64_t seed, int index) {
  return std::mt19937_64(seed + 0x9E3779B97F4A7C15ull *
                                    static_cast<std::uint64_t>(index + 1));
}

ProbeResult summarize_probe(const std::vector<Allocation>& limits,
                            const std::vector<double>& residuals,
                            const std::vector<char>& converged) {
  ProbeResult out;
  out.starts = static_cast<long>(limits.size());
  for (std::size_t i = 0; i < limits.size(); ++i) {
    if (!converged[i]) {
      out.all_converged = false;
      continue;
    }
    out.max_residual = std::max(out.max_residual, residuals[i]);
    for (std::size_t j = i + 1; j < limits.size(); ++j) {
      if (!converged[j]) continue;
      out.max_pairwise_distance =
          std::max(out.max_pairwise_distance, sup_distance(limits[i], limits[j]));
    }
  }
  return out;
}

} // namespace

ProbeResult multistart_probe(const MarketConfig& cfg, int n_starts,
                             std::uint64_t seed) {
  cfg.validate();
  std::vector<Allocation> limits(n_starts);
  std::vector<double> residuals(n_starts, 0.0);
  std::vector<char> converged(n_starts, 1);
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_starts; ++i) {
    try {
      std::mt19937_64 rng = engine_for_start(seed, i);
      const EquilibriumResult res =
          solve_numeric_from(cfg, random_feasible(cfg, rng));
      limits[i] = res.alloc;
      residuals[i] = res.residual;
    } catch (const SolverError&) {
      converged[i] = 0;
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return summarize_probe(limits, residuals, converged);
}

ProbeResult multistart_probe_serial(const MarketConfig& cfg, int n_starts,
                                    std::uint64_t seed) {
  cfg.validate();
  std::vector<Allocation> limits(n_starts);
  std::vector<double> residuals(n_starts, 0.0);
  std::vector<char> converged(n_starts, 1);
  for (int i = 0; i < n_starts; ++i) {
    try {
      std::mt19937_64 rng = engine_for_start(seed, i);
      const EquilibriumResult res =
          solve_numeric_from(cfg, random_feasible(cfg, rng));
      limits[i] = res.alloc;
      residuals[i] = res.residual;
    } catch (const SolverError&) {
      converged[i] = 0;
    }
  }
  return summarize_probe(limits, residuals, converged);
}

} // namespace spshare
