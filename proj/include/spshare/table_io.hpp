#pragma once

#include <string>

#include "spshare/analysis.hpp"
#include "spshare/scenario.hpp"

namespace spshare {

/// Shortest decimal representation that round-trips the double exactly;
/// emitted files are byte-for-byte reproducible on any IEEE-754 platform.
std::string format_double(double value);

/// CSV serialization of a sweep.  One header line, then one row per grid
/// point, LF-terminated, no trailing whitespace.  The leading columns are
///   W,x1_a,x1_ab,x2_ab,x2_b,p_a,p_ab,p_b,l_a,l_ab,l_b,r1,r2,
///   cs_a,cs_ab,cs_b,cs_total,welfare,regime
/// holding the competition result (or the cooperation result when mode is
/// cooperation); with mode both, the same columns repeat prefixed coop_ for
/// the cooperation counterfactual.
std::string emit_sweep_csv(const SweepTable& table, Mode mode);

/// Flat JSON object for a single solve, keyed like the CSV columns plus
/// method, residual and iterations.  `coop` may be null; when present its
/// fields are mirrored with a coop_ prefix.
std::string emit_solve_json(double w, const EquilibriumResult& primary,
                            const EquilibriumResult* coop);

} // namespace spshare
