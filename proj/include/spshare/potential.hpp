#pragma once

#include <array>

#include "spshare/market.hpp"

namespace spshare {

/// The game admits an exact potential: a single function whose change under
/// any unilateral deviation equals the deviating provider's revenue change.
/// It is a quadratic  phi(x) = -x'Qx + 1'x  in the stacked strategy vector
/// x = (sp1_dedicated, sp1_overlap, sp2_overlap, sp2_dedicated).
struct PotentialForm {
  /// Symmetric 4x4 coefficient matrix Q, in the fixed variable order above.
  std::array<std::array<double, 4>, 4> coeff{};
};

/// Builds the quadratic-form coefficients for a configuration.  All three
/// sub-market sizes must be positive (the coefficients carry 1/size terms).
PotentialForm build_form(const MarketConfig& cfg);

/// Potential value -x'Qx + 1'x.  Defined for any finite quantities, feasible
/// or not.
double potential_value(const Allocation& alloc, const MarketConfig& cfg);

/// True iff the coefficient matrix is positive definite, decided by
/// eliminating without pivoting and requiring every pivot to exceed 1e-12
/// (equivalent to all leading principal minors being positive).
bool is_positive_definite(const PotentialForm& form);

/// |[phi(to) - phi(from)] - [R_sp(to) - R_sp(from)]| for a deviation by one
/// provider.  Throws std::invalid_argument if the deviation touches the
/// other provider's quantities.  Exactness of the potential means this gap
/// is zero up to rounding (<= 1e-12 on unit-scale inputs).
double potential_identity_gap(const Allocation& from, const Allocation& to,
                              int sp, const MarketConfig& cfg);

} // namespace spshare
