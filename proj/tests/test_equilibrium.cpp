#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spshare/equilibrium.hpp"
#include "spshare/potential.hpp"

using namespace spshare;

namespace {

double sup_diff(const Allocation& a, const Allocation& b) {
  return std::max(std::max(std::abs(a.sp1_dedicated - b.sp1_dedicated),
                           std::abs(a.sp1_overlap - b.sp1_overlap)),
                  std::max(std::abs(a.sp2_overlap - b.sp2_overlap),
                           std::abs(a.sp2_dedicated - b.sp2_dedicated)));
}

} // namespace

TEST_CASE("closed form, below the entry bandwidth") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.1};
  const EquilibriumResult eq = closed_form_symmetric(cfg);
  CHECK(eq.alloc.sp1_dedicated == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(eq.alloc.sp1_overlap == 0.0);
  CHECK(eq.alloc.sp2_overlap == 0.0);
  CHECK(eq.alloc.sp2_dedicated == eq.alloc.sp1_dedicated);
  CHECK(eq.regime == Regime::kDedicatedOnly);
  CHECK(eq.method == SolveMethod::kClosedFormSymmetric);
  CHECK(eq.residual <= 1e-10);
  CHECK(eq.iterations == 0);

  // brute-force best-response iteration lands on the same point
  const oracle::GridPoint brute = oracle::best_response_grid(
      1, eq.alloc.sp2_dedicated, eq.alloc.sp2_overlap, cfg);
  CHECK(std::abs(brute.dedicated - eq.alloc.sp1_dedicated) <= 1e-4);
  CHECK(brute.overlap <= 1e-4);
}

TEST_CASE("closed form is continuous across the branch point") {
  // At W = m_a / 2 both branch formulas evaluate to m_a / 6.
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.2};
  const EquilibriumResult eq = closed_form_symmetric(cfg);
  const double low_branch = 0.2 * 0.4 / (2.0 * (0.2 + 0.4));
  const double c = 2.0 * (0.2 + 0.4 + 0.2) - 0.4 * 0.2 / 0.2;
  CHECK(c == doctest::Approx(1.2).epsilon(1e-14));
  const double high_branch = 0.2 * 0.4 / c;
  CHECK(low_branch == doctest::Approx(high_branch).epsilon(1e-13));
  CHECK(eq.alloc.sp1_dedicated == doctest::Approx(1.0 / 15).epsilon(1e-13));
  CHECK(eq.alloc.sp1_overlap == 0.0);
}

TEST_CASE("closed form, above the entry bandwidth") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.4};
  const EquilibriumResult eq = closed_form_symmetric(cfg);
  // C = 2 (0.4 + 0.4 + 0.2) - 0.4 * 0.2 / 0.4 = 1.8
  CHECK(eq.alloc.sp1_dedicated == doctest::Approx(0.4 * 0.4 / 1.8).epsilon(1e-14));
  CHECK(eq.alloc.sp1_overlap ==
        doctest::Approx((0.8 - 0.4) * 0.2 / (3.0 * 1.8)).epsilon(1e-14));
  CHECK(eq.alloc.sp1_overlap == doctest::Approx(2.0 / 135).epsilon(1e-12));
  CHECK(eq.regime == Regime::kBothInOverlap);
  CHECK(eq.residual <= 1e-10);

  // Nash property against the brute-force grid: neither provider can gain
  const oracle::GridPoint b1 = oracle::best_response_grid(
      1, eq.alloc.sp2_dedicated, eq.alloc.sp2_overlap, cfg);
  const Revenues r = revenues(eq.alloc, cfg);
  CHECK(b1.value - r.sp1 <= 1e-8);
}

TEST_CASE("closed form with an empty overlap collapses to the monopoly formula") {
  const MarketConfig cfg{0.5, 0.0, 0.5, 0.3};
  const EquilibriumResult eq = closed_form_symmetric(cfg);
  CHECK(eq.alloc.sp1_dedicated == doctest::Approx(0.09375).epsilon(1e-14));
  CHECK(eq.alloc.sp1_overlap == 0.0);
  CHECK(eq.regime == Regime::kDedicatedOnly);
}

TEST_CASE("closed form rejects asymmetric configurations") {
  CHECK_THROWS_AS(closed_form_symmetric(MarketConfig{0.5, 0.2, 0.3, 0.4}),
                  NotApplicableError);
}

TEST_CASE("best response against an idle opponent") {
  // Unconstrained stationary point of SP1's revenue for opponent (0, 0) at
  // W = 0.1: 25u + 20v = 1, 20u + 30v = 1, i.e. (1/35, 1/70).  Both
  // coordinates are feasible, so the best response enters the overlap even
  // though the equilibrium at this bandwidth has an empty overlap.
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.1};
  const BestResponse br = best_response({1, 0.0, 0.0, cfg});
  CHECK(br.dedicated == doctest::Approx(1.0 / 35).epsilon(1e-12));
  CHECK(br.overlap == doctest::Approx(1.0 / 70).epsilon(1e-12));

  const oracle::GridPoint brute = oracle::best_response_grid(1, 0.0, 0.0, cfg);
  CHECK(std::abs(brute.dedicated - br.dedicated) <= 1e-5);
  CHECK(std::abs(brute.overlap - br.overlap) <= 1e-5);
  CHECK(std::abs(brute.value - br.value) <= 1e-9);
}

TEST_CASE("best response is a fixed point at the closed-form equilibrium") {
  for (double w : {0.05, 0.15, 0.2, 0.3, 0.6, 1.0}) {
    const MarketConfig cfg{0.2, 0.6, 0.2, w};
    const EquilibriumResult eq = closed_form_symmetric(cfg);
    const BestResponse b1 =
        best_response({1, eq.alloc.sp2_dedicated, eq.alloc.sp2_overlap, cfg});
    const BestResponse b2 =
        best_response({2, eq.alloc.sp1_dedicated, eq.alloc.sp1_overlap, cfg});
    CHECK(std::abs(b1.dedicated - eq.alloc.sp1_dedicated) <= 1e-10);
    CHECK(std::abs(b1.overlap - eq.alloc.sp1_overlap) <= 1e-10);
    CHECK(std::abs(b2.dedicated - eq.alloc.sp2_dedicated) <= 1e-10);
    CHECK(std::abs(b2.overlap - eq.alloc.sp2_overlap) <= 1e-10);
  }
}

TEST_CASE("best response under a saturated overlap") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.5};
  const BestResponse br = best_response({1, 0.1, 0.2, cfg});
  CHECK(br.overlap == 0.0); // no room left in the overlap
  CHECK(br.dedicated > 0.0);
}

TEST_CASE("best response matches the grid oracle everywhere") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 150; ++t) {
    const double m_a = 0.05 + 0.4 * oracle::unit(rng);
    const double m_b = t % 3 == 0 ? m_a : 0.05 + 0.4 * oracle::unit(rng);
    const MarketConfig cfg{m_a, 1.0 - m_a - m_b, m_b,
                           0.05 + 1.45 * oracle::unit(rng)};
    const int sp = t % 2 + 1;
    const double opp_cap = sp == 1 ? cfg.size_b : cfg.size_a;
    const double opp_ded = oracle::unit(rng) * opp_cap;
    const double opp_ov = oracle::unit(rng) * cfg.size_ab;
    const BestResponse br = best_response({sp, opp_ded, opp_ov, cfg});
    const oracle::GridPoint brute =
        oracle::best_response_grid(sp, opp_ded, opp_ov, cfg);
    CHECK(std::abs(br.value - brute.value) <= 1e-9);
    CHECK(std::abs(br.dedicated - brute.dedicated) <= 1e-5);
    CHECK(std::abs(br.overlap - brute.overlap) <= 1e-5);
  }
}

TEST_CASE("numeric solver agrees with the closed form on symmetric configs") {
  for (double w = 0.02; w <= 1.0; w += 0.07) {
    for (auto sizes : {std::pair{0.4, 0.2}, {0.2, 0.6}}) {
      const MarketConfig cfg{sizes.first, sizes.second, sizes.first, w};
      const EquilibriumResult cf = closed_form_symmetric(cfg);
      const EquilibriumResult nm = solve_numeric(cfg);
      CHECK(sup_diff(cf.alloc, nm.alloc) <= 1e-8);
      CHECK(nm.residual <= 1e-8);
      CHECK(nm.method == SolveMethod::kNumericPotential);
      CHECK(nm.iterations > 0);
    }
  }
}

TEST_CASE("numeric solver handles decoupled markets") {
  const MarketConfig cfg{0.5, 0.0, 0.5, 0.3};
  const EquilibriumResult eq = solve_numeric(cfg);
  CHECK(eq.alloc.sp1_dedicated == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(eq.alloc.sp2_dedicated == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(eq.alloc.sp1_overlap == 0.0);
  CHECK(eq.alloc.sp2_overlap == 0.0);
}

TEST_CASE("potential never decreases along best-response rounds") {
  // Exactness makes each best-response step a potential ascent; this is the
  // solver's convergence diagnostic in the symmetric case.
  for (double w : {0.3, 0.7}) {
    const MarketConfig cfg{0.2, 0.6, 0.2, w};
    Allocation x{};
    double prev = potential_value(x, cfg);
    for (int round = 0; round < 100; ++round) {
      const BestResponse b1 =
          best_response({1, x.sp2_dedicated, x.sp2_overlap, cfg});
      x.sp1_dedicated = b1.dedicated;
      x.sp1_overlap = b1.overlap;
      const double phi1 = potential_value(x, cfg);
      CHECK(phi1 >= prev - 1e-12);
      prev = phi1;
      const BestResponse b2 =
          best_response({2, x.sp1_dedicated, x.sp1_overlap, cfg});
      x.sp2_dedicated = b2.dedicated;
      x.sp2_overlap = b2.overlap;
      const double phi2 = potential_value(x, cfg);
      CHECK(phi2 >= prev - 1e-12);
      prev = phi2;
    }
  }
}

TEST_CASE("equilibrium symmetry") {
  for (double w : {0.05, 0.25, 0.8}) {
    const MarketConfig cfg{0.3, 0.4, 0.3, w};
    const EquilibriumResult eq = solve_numeric(cfg);
    CHECK(std::abs(eq.alloc.sp1_dedicated - eq.alloc.sp2_dedicated) <= 1e-10);
    CHECK(std::abs(eq.alloc.sp1_overlap - eq.alloc.sp2_overlap) <= 1e-10);
  }
}

TEST_CASE("equilibrium service prices are nonnegative where served") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 60; ++t) {
    const double m_a = 0.05 + 0.4 * oracle::unit(rng);
    const double m_b = t % 2 == 0 ? m_a : 0.05 + 0.4 * oracle::unit(rng);
    const MarketConfig cfg{m_a, 1.0 - m_a - m_b, m_b,
                           0.02 + 1.5 * oracle::unit(rng)};
    const EquilibriumResult eq = solve_numeric(cfg);
    const MarketOutcome& o = eq.outcome;
    if (eq.alloc.sp1_dedicated > kEntryTol) CHECK(o.service_a >= -1e-12);
    if (eq.alloc.sp2_dedicated > kEntryTol) CHECK(o.service_b >= -1e-12);
    if (eq.alloc.sp1_overlap + eq.alloc.sp2_overlap > kEntryTol) {
      CHECK(o.service_ab >= -1e-12);
    }
  }
}

TEST_CASE("verify_nash flags non-equilibria") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.3};
  // idle profiles are never equilibria: entering the dedicated sub-market
  // pays (value confirmed against the grid oracle)
  const double zero_res = verify_nash({}, cfg);
  CHECK(zero_res > 0.0);
  const oracle::GridPoint brute = oracle::best_response_grid(1, 0.0, 0.0, cfg);
  CHECK(zero_res == doctest::Approx(brute.value).epsilon(1e-7));

  CHECK(verify_nash(closed_form_symmetric(cfg).alloc, cfg) <= 1e-10);
}

TEST_CASE("cooperation decouples the game") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.4};
  const EquilibriumResult coop = solve_cooperation(cfg);
  CHECK(coop.alloc.sp1_dedicated == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(coop.alloc.sp2_dedicated == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(coop.alloc.sp1_overlap == 0.0);
  CHECK(coop.alloc.sp2_overlap == 0.0);
  CHECK(coop.method == SolveMethod::kCooperation);
  CHECK(coop.regime == Regime::kDedicatedOnly);

  // single-variable maximization oracle for the dedicated quantity
  CHECK(std::abs(oracle::dedicated_monopoly_grid(0.4, 0.4) - 0.1) <= 1e-6);
}

TEST_CASE("cooperation equals competition below the entry bandwidth") {
  for (double w : {0.05, 0.1, 0.19}) {
    const MarketConfig cfg{0.4, 0.2, 0.4, w};
    const EquilibriumResult coop = solve_cooperation(cfg);
    const EquilibriumResult comp = solve_numeric(cfg);
    CHECK(sup_diff(coop.alloc, comp.alloc) <= 1e-10);
    CHECK(coop.residual <= 1e-10);
  }
}

TEST_CASE("cooperation is not an equilibrium at large bandwidth") {
  const MarketConfig cfg{0.2, 0.6, 0.2, 1.0};
  const EquilibriumResult coop = solve_cooperation(cfg);
  CHECK(coop.residual > 1e-3);
  const EquilibriumResult comp = solve_numeric(cfg);
  CHECK(sup_diff(coop.alloc, comp.alloc) > 1e-3);
}

TEST_CASE("cooperation with a vanishing dedicated market") {
  const MarketConfig cfg{0.0, 0.6, 0.4, 0.5};
  const EquilibriumResult coop = solve_cooperation(cfg);
  CHECK(coop.alloc.sp1_dedicated == 0.0);
  CHECK(coop.alloc.sp2_dedicated > 0.0);
}

TEST_CASE("boundary deviations: overlap-only profile") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.5};
  const auto finding = boundary_deviation({0.0, 0.05, 0.05, 0.1}, cfg);
  REQUIRE(finding.has_value());
  REQUIRE(std::holds_alternative<ProfitableDeviation>(*finding));
  const auto& dev = std::get<ProfitableDeviation>(*finding);
  CHECK(dev.pattern == BoundaryPattern::kOverlapOnly);
  CHECK(dev.sp == 1);
  CHECK(dev.revenue_gain > 0.0);
  CHECK(dev.deviated.sp1_dedicated > 0.0);
  // realized gain is reproduced by the independent revenue oracle
  CHECK(oracle::revenue(1, dev.deviated, cfg) -
            oracle::revenue(1, clamp_feasible({0.0, 0.05, 0.05, 0.1}, cfg),
                            cfg) ==
        doctest::Approx(dev.revenue_gain).epsilon(1e-10));
}

TEST_CASE("boundary deviations: idle provider") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.5};
  const auto finding = boundary_deviation({0.0, 0.0, 0.05, 0.1}, cfg);
  REQUIRE(finding.has_value());
  REQUIRE(std::holds_alternative<ProfitableDeviation>(*finding));
  const auto& dev = std::get<ProfitableDeviation>(*finding);
  CHECK(dev.pattern == BoundaryPattern::kIdle);
  CHECK(dev.sp == 1);
  CHECK(dev.revenue_gain > 0.0);
  CHECK(dev.deviated.sp1_overlap == 0.0);
}

TEST_CASE("boundary deviations: mirrored patterns") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.5};
  const auto l1 = boundary_deviation({0.1, 0.05, 0.05, 0.0}, cfg);
  REQUIRE(l1.has_value());
  CHECK(std::get<ProfitableDeviation>(*l1).sp == 2);
  const auto l2 = boundary_deviation({0.1, 0.05, 0.0, 0.0}, cfg);
  REQUIRE(l2.has_value());
  const auto& dev = std::get<ProfitableDeviation>(*l2);
  CHECK(dev.pattern == BoundaryPattern::kIdle);
  CHECK(dev.sp == 2);
}

TEST_CASE("no boundary pattern at the equilibrium") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.5};
  const EquilibriumResult eq = solve_numeric(cfg);
  CHECK_FALSE(boundary_deviation(eq.alloc, cfg).has_value());
}

TEST_CASE("squeeze-out boundary is stationary-infeasible below entry") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.1};
  const auto finding = boundary_deviation({0.1, 0.0, 0.05, 0.1}, cfg);
  REQUIRE(finding.has_value());
  REQUIRE(std::holds_alternative<FocInfeasibility>(*finding));
  const auto& foc = std::get<FocInfeasibility>(*finding);
  CHECK(foc.squeezed_sp == 1);
  CHECK(foc.cross_product < 0.0);

  // the reported triple really is stationary for the boundary-restricted
  // revenues (central differences of the oracle revenue)
  const Allocation at{foc.own_dedicated, 0.0, foc.other_overlap,
                      foc.other_dedicated};
  CHECK(std::abs(oracle::revenue_partial(1, false, at, cfg)) <= 1e-6);
  CHECK(std::abs(oracle::revenue_partial(2, true, at, cfg)) <= 1e-6);
  CHECK(std::abs(oracle::revenue_partial(2, false, at, cfg)) <= 1e-6);

  // mirrored orientation
  const auto mirrored = boundary_deviation({0.1, 0.05, 0.0, 0.1}, cfg);
  REQUIRE(mirrored.has_value());
  REQUIRE(std::holds_alternative<FocInfeasibility>(*mirrored));
  CHECK(std::get<FocInfeasibility>(*mirrored).squeezed_sp == 2);
  CHECK(std::get<FocInfeasibility>(*mirrored).cross_product < 0.0);
}

TEST_CASE("squeeze-out system above entry is recorded without a sign claim") {
  const MarketConfig cfg{0.4, 0.2, 0.4, 0.5};
  const auto finding = boundary_deviation({0.1, 0.0, 0.05, 0.1}, cfg);
  REQUIRE(finding.has_value());
  REQUIRE(std::holds_alternative<FocInfeasibility>(*finding));
  const auto& foc = std::get<FocInfeasibility>(*finding);
  const Allocation at{foc.own_dedicated, 0.0, foc.other_overlap,
                      foc.other_dedicated};
  CHECK(std::abs(oracle::revenue_partial(1, false, at, cfg)) <= 1e-6);
  MESSAGE("above-entry cross product: ", foc.cross_product);
}

TEST_CASE("multi-start agreement") {
  for (const MarketConfig& cfg :
       {MarketConfig{0.4, 0.2, 0.4, 0.35}, MarketConfig{0.3, 0.5, 0.2, 0.6},
        MarketConfig{0.5, 0.2, 0.3, 0.15}}) {
    const ProbeResult probe = multistart_probe(cfg, 20, 77);
    CHECK(probe.all_converged);
    CHECK(probe.max_pairwise_distance <= 1e-7);
    CHECK(probe.max_residual <= 1e-8);
    CHECK(probe.starts == 20);
  }
}

TEST_CASE("regime classification") {
  CHECK(classify_regime({0.1, 0.0, 0.0, 0.1}) == Regime::kDedicatedOnly);
  CHECK(classify_regime({0.1, 0.01, 0.0, 0.1}) == Regime::kSp1InOverlap);
  CHECK(classify_regime({0.1, 0.0, 0.01, 0.1}) == Regime::kSp2InOverlap);
  CHECK(classify_regime({0.1, 0.01, 0.01, 0.1}) == Regime::kBothInOverlap);
  CHECK(to_string(Regime::kDedicatedOnly) == std::string("dedicated_only"));
  CHECK(to_string(SolveMethod::kCooperation) == std::string("cooperation"));
}
