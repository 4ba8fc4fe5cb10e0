#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fkdv/branch.hpp"
#include "fkdv/diagnostics.hpp"
#include "fkdv/kernel.hpp"

namespace fkdv {

/// Shortest decimal string that round-trips to the same binary64.
std::string format_double(double value);

/// Header `x,kp,kp_prime`, one row per grid point.
void write_kernel_csv(std::ostream& out, const KernelTable& table);
nlohmann::json to_json(const KernelPropertyReport& report);

nlohmann::json to_json(const SteadyState& state, double alpha);
/// Inverse of to_json(SteadyState); returns the stored alpha through `alpha`.
SteadyState steady_state_from_json(const nlohmann::json& j, double* alpha = nullptr);

/// Header `x,phi` over one full period, 2 * intervals + 1 rows.
void write_grid_csv(std::ostream& out, const SteadyState& state, int intervals);

/// Header `s,mu,crest_gap,a0,...,aN`; shorter series are zero padded.
void write_branch_csv(std::ostream& out, std::span<const BranchPoint> points);
/// Reads back what write_branch_csv produced. Trailing zero coefficients are
/// kept, so every point carries the widest mode count of the file.
std::vector<BranchPoint> read_branch_csv(std::istream& in, int k);

nlohmann::json run_metadata(const ContinuationConfig& config, const BranchRun& run);
nlohmann::json to_json(const Check& check);
nlohmann::json to_json(const DiagnosticsReport& report);
nlohmann::json diagnostics_json(std::span<const BranchPoint> points);

}  // namespace fkdv
