#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spshare {

/// Command-line entry point, separated from main() so tests can drive it.
///
/// Subcommands (each takes --scenario <file-or-builtin> and optional
/// --out <path>, default standard output):
///   solve       equilibrium at a single bandwidth, as flat JSON
///   sweep       bandwidth sweep as CSV
///   thresholds  overlap entry bandwidth per provider
///   verify      property suites (potential identity, definiteness,
///               boundary deviations, multi-start uniqueness)
///
/// Data goes to the output stream or --out file; diagnostics go to `err`.
/// Returns 0 on success, 1 on usage/validation errors, 2 on solver or
/// verification failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace spshare
