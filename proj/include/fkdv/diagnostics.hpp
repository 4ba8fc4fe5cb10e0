#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fkdv/spectral.hpp"

namespace fkdv {

struct Check {
  std::string name;
  bool pass = false;
  /// Signed distance to the inequality; positive means satisfied.
  double margin = 0.0;
  std::string detail;
  bool applicable = true;
};

struct DiagnosticsReport {
  std::vector<Check> checks;
  std::optional<double> crest_exponent;
  std::optional<double> second_derivative_at_crest;

  bool all_pass() const noexcept;
  const Check* find(const std::string& name) const noexcept;
};

struct CheckOptions {
  double newton_tol = 1e-11;
  /// Pointwise checks use 2 * grid_factor * N points per period.
  int grid_factor = 4;

  /// Inequality slack 10 * newton_tol * (1 + sup|phi|).
  double slack(double sup_phi) const noexcept { return 10.0 * newton_tol * (1.0 + sup_phi); }
};

/// Translate by half a period when a_1 < 0 so that the crest sits at x = 0.
SteadyState crest_aligned(const SteadyState& state);

/// mu - max phi on the diagnostics grid.
double crest_gap(const SteadyState& state, int grid_factor = 4);

Check check_apriori_bounds(const SteadyState& state, const CheckOptions& options = {});
Check check_linf_bound(const SteadyState& state, const CheckOptions& options = {});
Check check_monotone_half_period(const SteadyState& state, const CheckOptions& options = {});
Check check_speed_window(std::span<const double> speeds);
Check check_trough_gap(const SteadyState& state, double lambda, const CheckOptions& options = {});

/// Coefficient-decay fit. Exponential-type decay is required while the crest
/// gap is at least 0.1 mu; closer to the limit the algebraic rate p in
/// |a_j| ~ j^-p is reported and the check asks only for p > 1.
/// Throws Error(InsufficientModes) for fewer than 48 modes.
Check smoothness_proxy(const SteadyState& state, const CheckOptions& options = {});

double second_derivative_at_crest(const SteadyState& state);

struct CrestWindow {
  double x_lo = 0.0;  // 0 selects 4 pi/(k N)
  double x_hi = 0.0;  // 0 selects pi/(8 k)
  int samples = 16;
};

/// Least-squares slope of log(phi(0) - phi(x)) against log x on geometric
/// samples of the window. Throws Error(WindowTooNarrow) if x_hi < 2 x_lo or
/// samples < 12.
double crest_exponent(const SteadyState& state, const CrestWindow& window = {});

/// Per-point report: apriori_bounds, linf_bound, monotone_half_period,
/// trough_gap, smoothness_proxy (in that order), plus the crest curvature.
DiagnosticsReport diagnose(const SteadyState& state, double lambda,
                           const CheckOptions& options = {});

}  // namespace fkdv
