#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spshare/analysis.hpp"
#include "spshare/market.hpp"

namespace spshare {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { kCompetition, kCooperation, kBoth };

const char* to_string(Mode mode);

struct SweepRange {
  double w_min = 0.0;
  double w_max = 0.0;
  double w_step = 0.0;
};

/// A parsed scenario: sub-market sizes plus either a single bandwidth (for
/// one-shot solves) or a bandwidth grid (for sweeps).
struct ScenarioFile {
  std::string name;
  double size_a = 0.0;
  double size_ab = 0.0;
  double size_b = 0.0;
  std::optional<double> w;         ///< single-solve bandwidth
  std::optional<SweepRange> range; ///< sweep grid; exactly one of w/range set
  Mode mode = Mode::kCompetition;

  MarketConfig config() const;   ///< requires a single-W scenario
  SweepSpec sweep_spec() const;  ///< requires a range scenario
};

/// Parses the flat key=value scenario format:
///   - UTF-8, LF line endings, one `key=value` per line
///   - `#` starts a comment line; blank lines are ignored
///   - keys: name, m_a, m_ab, m_b, w, w_min, w_max, w_step, mode
/// Unknown or duplicate keys, malformed lines and invariant violations are
/// rejected with a message carrying the line number or field name.  Sizes
/// must sum to one within 1e-9 and are renormalized exactly afterwards.
ScenarioFile parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(canonical_text(s)) reproduces s.
std::string canonical_text(const ScenarioFile& scenario);

/// The four scenarios the tool ships with: two symmetric configurations
/// (small and large overlap) and two asymmetric ones, each sweeping
/// W in [0.01, 1.0] by 0.01 with the cooperation counterfactual included.
const std::vector<ScenarioFile>& built_in_scenarios();

/// Looks up a built-in scenario by name (with or without a ".cfg" suffix);
/// nullptr if there is none.
const ScenarioFile* find_builtin(std::string_view name);

} // namespace spshare
