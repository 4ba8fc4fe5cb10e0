#pragma once

#include <span>
#include <string>
#include <vector>

#include "fkdv/diagnostics.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

struct LocalBifurcationData {
  int k = 1;
  double mu_star = 0.0;
  CosineSeries phi2{1, 2};
  double mu2 = 0.0;
};

/// mu_k* = m(k). Throws Error(InvalidArgument) for k < 1.
double bifurcation_point(const MultiplierSymbol& symbol, int k);

/// 1/(4(m(k) - m(0))) + 1/(8(m(k) - m(2k))). No sign is implied.
double mu2_coefficient(const MultiplierSymbol& symbol, int k);

/// phi2 is stored in the base-k basis (entries a_0 and a_2).
LocalBifurcationData local_bifurcation_data(const MultiplierSymbol& symbol, int k);

/// eps cos(kx) + eps^2 phi2 with speed m(k) + eps^2 mu2, in `modes` modes.
SteadyState asymptotic_branch(const MultiplierSymbol& symbol, int k, double eps, int modes = 8);

struct StepControl {
  double grow = 2.0;
  double shrink = 0.5;
  int fast_iterations = 3;
  double min_step = 1e-6;  // times m(k)
  double max_step = 0.1;   // times m(k)
};

struct ContinuationConfig {
  double alpha = 2.0;
  int k = 1;
  int modes = 256;
  int max_modes = 1024;
  double s_start = 0.02;  // times m(k)
  double s_step = 0.02;   // times m(k)
  StepControl step_control;
  double newton_tol = 1e-11;
  int newton_max_iter = 30;
  double damping_floor = 1.0 / 64.0;
  /// Stop once crest_gap < stop_crest_gap * mu.
  double stop_crest_gap = 1e-3;
  /// Below escalate_crest_gap * mu: re-project onto more modes and finish
  /// the approach in the crest-gap chart.
  double escalate_crest_gap = 0.05;
  int escalation_factor = 4;
  /// Target ratio between consecutive crest gaps in the crest-gap chart.
  double gap_reduction = 0.6;
  int max_points = 400;
  /// +1 follows s > 0, -1 the mirrored branch s < 0.
  int direction = 1;
  bool run_diagnostics = true;

  /// Throws Error(InvalidArgument) describing the first violated constraint.
  void validate() const;
};

enum class Chart { Amplitude, CrestGap };

struct BranchPoint {
  SteadyState state;
  double s = 0.0;
  double newton_residual = 0.0;
  double crest_gap = 0.0;
  int iterations = 0;
  Chart chart = Chart::Amplitude;
  DiagnosticsReport diagnostics;
  bool flagged = false;
};

/// Damped Newton on {F_j(phi, mu) = 0, j = 0..N; a_1 = s}.
/// Throws Error(NoConvergence), Error(Inadmissible) or
/// Error(LeftAdmissibleSet); s == 0 is rejected with InvalidArgument.
BranchPoint newton_correct(const SteadyState& guess, double s, const MultiplierSymbol& symbol,
                           const ContinuationConfig& config);

/// Same system with the amplitude constraint replaced by mu - phi(0) = gap.
BranchPoint newton_correct_crest_gap(const SteadyState& guess, double gap,
                                     const MultiplierSymbol& symbol,
                                     const ContinuationConfig& config);

enum class StopReason { CrestGap, MaxPoints, Stalled };
const char* to_string(StopReason reason) noexcept;

struct BranchRun {
  std::vector<BranchPoint> points;
  StopReason stopped_reason = StopReason::Stalled;
  double lambda = 0.0;
  Check speed_window;
};

/// Amplitude-chart continuation from the asymptotic branch, followed by a
/// crest-gap chart once the wave is close to the highest one. A partial
/// branch is returned on stall.
BranchRun continue_branch(const MultiplierSymbol& symbol, const ContinuationConfig& config);

Check check_speed_window(std::span<const BranchPoint> branch);

/// Linear least-squares extrapolation of (a, mu) against crest gap -> 0 over
/// the given tail, with mu reset to phi(0). Needs >= 3 points with strictly
/// decreasing crest gap, else Error(InsufficientTail).
SteadyState extrapolate_highest(std::span<const BranchPoint> tail);

struct Mu2Estimate {
  double formula = 0.0;
  double richardson = 0.0;
  double relative_error = 0.0;
};

/// Richardson estimate of mu2 from the corrected branch at s0 and s0/2:
/// D(s) = (mu(s) - m(k))/s^2 = mu2 + O(s^2).
Mu2Estimate richardson_mu2(const MultiplierSymbol& symbol, int k, double s0,
                           const ContinuationConfig& config);

}  // namespace fkdv
