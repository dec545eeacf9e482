#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <variant>

#include "spshare/market.hpp"

namespace spshare {

/// A profile is accepted as a Nash equilibrium iff no provider can improve
/// its revenue by more than this through a unilateral deviation.
inline constexpr double kNashResidualTol = 1e-8;

/// Best-response iteration stops once a full round moves no quantity by more
/// than this (sup-norm).
inline constexpr double kStepTol = 1e-12;

inline constexpr long kMaxIterations = 100000;

/// A provider "serves the overlap" once its overlap quantity exceeds this.
inline constexpr double kEntryTol = 1e-10;

/// Requested closed form does not apply to this configuration.
struct NotApplicableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& msg, const Allocation& last, double res,
              long iters)
      : std::runtime_error(msg), last_iterate(last), residual(res),
        iterations(iters) {}
  Allocation last_iterate;
  double residual;
  long iterations;
};

enum class Regime {
  kDedicatedOnly,  ///< neither provider serves the overlap
  kSp1InOverlap,   ///< only SP1 serves the overlap
  kSp2InOverlap,   ///< only SP2 serves the overlap
  kBothInOverlap,
};

enum class SolveMethod {
  kClosedFormSymmetric,
  kNumericPotential,
  kCooperation,
};

const char* to_string(Regime regime);
const char* to_string(SolveMethod method);

Regime classify_regime(const Allocation& alloc);

struct EquilibriumResult {
  Allocation alloc;
  MarketOutcome outcome;
  Regime regime = Regime::kDedicatedOnly;
  SolveMethod method = SolveMethod::kNumericPotential;
  /// Maximum revenue improvement available to either provider through a
  /// unilateral deviation.  At most kNashResidualTol for results labeled an
  /// equilibrium; informative (often large) for the cooperation profile.
  double residual = 0.0;
  long iterations = 0;
};

/// One provider's decision problem with the opponent's quantities held
/// fixed: maximize that provider's revenue over its own two quantities.
struct BestResponseProblem {
  int sp = 1; ///< 1 or 2
  double opponent_dedicated = 0.0;
  double opponent_overlap = 0.0;
  MarketConfig cfg;
};

struct BestResponse {
  double dedicated = 0.0;
  double overlap = 0.0;
  double value = 0.0; ///< revenue at the maximizer
};

/// Exact maximizer of a strictly concave two-variable quadratic over a box,
/// found by enumerating the stationary point of every face (interior, four
/// edges, four vertices) and keeping the feasible candidate with the highest
/// revenue.  Ties within 1e-14 prefer the candidate with fewer active
/// constraints.
BestResponse best_response(const BestResponseProblem& problem);

/// Nash residual of a profile: the larger of the two providers' available
/// best-response improvements, clamped at zero.
double verify_nash(const Allocation& alloc, const MarketConfig& cfg);

/// Closed-form equilibrium for symmetric configurations (size_a == size_b).
/// Below the entry bandwidth size_a / 2 both providers stay out of the
/// overlap and each serves W m / (2 (W + m)) in its dedicated sub-market;
/// above it both enter.  Throws NotApplicableError for asymmetric
/// configurations (solve_numeric handles those).
EquilibriumResult closed_form_symmetric(const MarketConfig& cfg);

/// Equilibrium by alternating exact best responses from the all-zero
/// profile.  Works for symmetric and asymmetric configurations; the result
/// is verified and carries its Nash residual.
EquilibriumResult solve_numeric(const MarketConfig& cfg);

/// Same iteration from a caller-chosen start; used for multi-start
/// uniqueness probes.
EquilibriumResult solve_numeric_from(const MarketConfig& cfg,
                                     const Allocation& start);

/// Counterfactual in which both providers commit to zero overlap quantity.
/// The game then decouples and each provider serves the dedicated-monopoly
/// quantity W m / (2 (W + m)).  The residual reports how far this profile is
/// from an equilibrium of the unrestricted game.
EquilibriumResult solve_cooperation(const MarketConfig& cfg);

/// Boundary shapes that can never host an equilibrium.
enum class BoundaryPattern {
  kOverlapOnly, ///< a provider serves the overlap but not its dedicated area
  kIdle,        ///< a provider serves nothing at all
};

/// A deviation proving a boundary profile is not an equilibrium: the named
/// provider strictly gains revenue_gain by moving to `deviated`.
struct ProfitableDeviation {
  BoundaryPattern pattern = BoundaryPattern::kOverlapOnly;
  int sp = 0; ///< deviating provider
  Allocation deviated;
  double revenue_gain = 0.0;
};

/// Report on the one-provider-out-of-the-overlap boundary: the stationary
/// system for the three remaining quantities, whose solution carries a
/// negative cross product exactly when that boundary cannot host an
/// equilibrium.
struct FocInfeasibility {
  int squeezed_sp = 0;    ///< provider with zero overlap quantity
  double own_dedicated = 0.0;   ///< squeezed provider's dedicated quantity
  double other_overlap = 0.0;   ///< other provider's overlap quantity
  double other_dedicated = 0.0; ///< other provider's dedicated quantity
  double cross_product = 0.0;   ///< own_dedicated * other_overlap
};

using BoundaryFinding = std::variant<ProfitableDeviation, FocInfeasibility>;

/// Matches the profile against the boundary patterns ruled out by the
/// uniqueness argument and returns the corresponding evidence:
///   - dedicated quantity zero but overlap positive: shift a small amount
///     into the dedicated sub-market (strict gain for any feasible opponent);
///   - provider fully idle: enter the dedicated sub-market with a small
///     quantity (strict gain whenever the opponent leaves headroom);
///   - overlap quantity zero while the opponent's is positive: report the
///     boundary stationary system and its cross-product sign.
/// The shift size is found by halving from 1e-2 until the realized revenue
/// gain is strictly positive.  Returns nullopt if no pattern matches or no
/// strictly profitable shift exists.
std::optional<BoundaryFinding> boundary_deviation(const Allocation& alloc,
                                            const MarketConfig& cfg);

/// Uniformly sampled feasible allocation; used by probes and tests.
Allocation random_feasible(const MarketConfig& cfg, std::mt19937_64& rng);

/// Multi-start agreement probe: solve from n random feasible starts and
/// measure how far apart the limits are.  Agreement within 1e-7 across
/// starts is the executable face of equilibrium uniqueness.
struct ProbeResult {
  double max_pairwise_distance = 0.0; ///< sup-norm over the four quantities
  double max_residual = 0.0;
  long starts = 0;
  bool all_converged = true;
};

/// OpenMP-parallel over starts when available.
ProbeResult multistart_probe(const MarketConfig& cfg, int n_starts,
                             std::uint64_t seed);

/// Serial reference implementation; must agree exactly with
/// multistart_probe.
ProbeResult multistart_probe_serial(const MarketConfig& cfg, int n_starts,
                                    std::uint64_t seed);

} // namespace spshare
