#pragma once

#include <stdexcept>
#include <string>

/// Two-provider spectrum-sharing market with partially overlapping coverage.
///
/// The market consists of three sub-markets: A (covered only by SP1),
/// AB (covered by both providers) and B (covered only by SP2).  Total user
/// mass is normalized to one and the inverse demand intercept is one, so all
/// quantities, prices and surpluses live on a [0, 1] scale.
namespace spshare {

/// Absolute tolerance for feasibility checks.  Quantities violating a
/// constraint by no more than this (solver iterates graze the boundary) are
/// clamped onto it; larger violations are errors.
inline constexpr double kFeasibilityTol = 1e-9;

/// Tolerance on the sum-to-one normalization of sub-market sizes.
inline constexpr double kSizeSumTol = 1e-12;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exogenous market parameters: the three sub-market sizes and the shared
/// bandwidth.  Sizes must be nonnegative and sum to one; a size of exactly
/// zero marks a degenerate sub-market in which nobody can be served.
struct MarketConfig {
  double size_a = 0.0;    ///< mass of users covered only by SP1
  double size_ab = 0.0;   ///< mass of users in the overlapping area
  double size_b = 0.0;    ///< mass of users covered only by SP2
  double bandwidth = 0.0; ///< shared bandwidth, must be positive

  /// Throws ConfigError if sizes are negative, do not sum to one within
  /// kSizeSumTol, or the bandwidth is not positive.
  void validate() const;

  bool symmetric(double tol = 1e-12) const;
};

/// A strategy profile: the quantity of users each provider serves in each
/// sub-market it covers.
struct Allocation {
  double sp1_dedicated = 0.0; ///< SP1's quantity in sub-market A
  double sp1_overlap = 0.0;   ///< SP1's quantity in sub-market AB
  double sp2_overlap = 0.0;   ///< SP2's quantity in sub-market AB
  double sp2_dedicated = 0.0; ///< SP2's quantity in sub-market B
};

/// Checks the three coverage constraints
///   0 <= sp1_dedicated <= size_a
///   0 <= sp1_overlap + sp2_overlap <= size_ab
///   0 <= sp2_dedicated <= size_b
/// and returns the allocation with violations within kFeasibilityTol clamped
/// onto the boundary.  Violations beyond the tolerance throw
/// FeasibilityError naming the violated constraint.
Allocation clamp_feasible(const Allocation& alloc, const MarketConfig& cfg);

/// True iff the allocation satisfies the coverage constraints within
/// kFeasibilityTol.
bool is_feasible(const Allocation& alloc, const MarketConfig& cfg);

struct Prices {
  double a = 1.0, ab = 1.0, b = 1.0;
};

struct Latencies {
  double a = 0.0, ab = 0.0, b = 0.0;
};

struct Revenues {
  double sp1 = 0.0, sp2 = 0.0;
};

struct Surplus {
  double a = 0.0, ab = 0.0, b = 0.0;
  double total = 0.0;
};

/// Everything the model says about the market at one allocation.
struct MarketOutcome {
  Prices price;       ///< market-clearing (delivered) prices per sub-market
  Latencies latency;  ///< congestion costs per sub-market
  double service_a = 0.0;  ///< delivered price minus latency cost in A
  double service_ab = 0.0; ///< same for AB
  double service_b = 0.0;  ///< same for B
  Revenues revenue;
  Surplus surplus;
  double welfare = 0.0; ///< surplus.total + revenue.sp1 + revenue.sp2
};

/// Market-clearing price of each sub-market under linear inverse demand.
/// A degenerate sub-market (size zero, quantity zero) reports price one,
/// the empty-market limit.
Prices delivered_prices(const Allocation& alloc, const MarketConfig& cfg);

/// Congestion cost per sub-market.  Traffic in the overlap interferes with
/// both dedicated areas, so the overlap is always at least as crowded as
/// either dedicated sub-market.
Latencies latency_costs(const Allocation& alloc, const MarketConfig& cfg);

/// Revenue of each provider: quantity times service price, summed over the
/// sub-markets it serves.  May be negative; service prices are not clamped.
Revenues revenues(const Allocation& alloc, const MarketConfig& cfg);

/// Consumer surplus per sub-market (area under the inverse demand curve
/// above the delivered price).  A degenerate sub-market contributes zero.
Surplus consumer_surplus(const Allocation& alloc, const MarketConfig& cfg);

/// Full evaluation: prices, latencies, service prices, revenues, surpluses
/// and social welfare at one allocation.
MarketOutcome evaluate(const Allocation& alloc, const MarketConfig& cfg);

} // namespace spshare
