#include "fkdv/branch.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fkdv/error.hpp"

namespace fkdv {
namespace {

// Extra equation closing the (N+2)-unknown Newton system.
struct Constraint {
  enum class Kind { Amplitude, CrestGap } kind;
  double value;
  double crest_sign = 1.0;  // +1: crest at x = 0, -1: crest at x = pi/k

  double evaluate(const CosineSeries& phi, double mu) const {
    if (kind == Kind::Amplitude) return phi[1] - value;
    double crest = 0.5 * phi[0];
    for (int j = 1; j <= phi.modes(); ++j) crest += (j % 2 == 1 && crest_sign < 0 ? -1.0 : 1.0) * phi[j];
    return mu - crest - value;
  }

  Eigen::RowVectorXd row(int modes) const {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(modes + 2);
    if (kind == Kind::Amplitude) {
      row(1) = 1.0;
      return row;
    }
    row(0) = -0.5;
    for (int j = 1; j <= modes; ++j) row(j) = (j % 2 == 1 && crest_sign < 0) ? 1.0 : -1.0;
    row(modes + 1) = 1.0;
    return row;
  }
};

double sup_norm(const CosineSeries& r, double constraint) {
  double m = std::abs(constraint);
  for (int j = 0; j <= r.modes(); ++j) m = std::max(m, std::abs(r[j]));
  return m;
}

double admissibility_margin(const SteadyState& s, const CheckOptions& opts) {
  return crest_gap(s, opts.grid_factor);
}

BranchPoint solve(const SteadyState& guess, const Constraint& constraint,
                  const MultiplierSymbol& symbol, const ContinuationConfig& config) {
  const CheckOptions opts{config.newton_tol};
  SteadyState x = guess;
  if (constraint.kind == Constraint::Kind::Amplitude) x.phi[1] = constraint.value;
  const int n = x.phi.modes();

  auto norm_of = [&](const SteadyState& s) {
    return sup_norm(residual(s, symbol), constraint.evaluate(s.phi, s.mu));
  };

  double norm = norm_of(x);
  double margin = admissibility_margin(x, opts);
  int it = 0;
  for (; norm > config.newton_tol; ++it) {
    if (it >= config.newton_max_iter || !std::isfinite(norm))
      throw Error(ErrorKind::NoConvergence, "no convergence after " + std::to_string(it) +
                                                " Newton iterations (residual " +
                                                std::to_string(norm) + ")");
    const CosineSeries r = residual(x, symbol);
    Eigen::MatrixXd a(n + 2, n + 2);
    a.topLeftCorner(n + 1, n + 1) = jacobian_matrix(x, symbol);
    for (int j = 0; j <= n; ++j) a(j, n + 1) = x.phi[j];  // dF/dmu = phi
    a.row(n + 1) = constraint.row(n);
    Eigen::VectorXd rhs(n + 2);
    for (int j = 0; j <= n; ++j) rhs(j) = -r[j];
    rhs(n + 1) = -constraint.evaluate(x.phi, x.mu);
    const Eigen::VectorXd step = a.partialPivLu().solve(rhs);

    // Backtracking on the residual norm; trial points that leave phi < mu
    // from an admissible iterate count as too long.
    bool left_admissible = false;
    bool accepted = false;
    for (double damping = 1.0; damping >= config.damping_floor; damping *= 0.5) {
      SteadyState trial = x;
      for (int j = 0; j <= n; ++j) trial.phi[j] += damping * step(j);
      trial.mu += damping * step(n + 1);
      if (constraint.kind == Constraint::Kind::Amplitude) trial.phi[1] = constraint.value;
      const double trial_margin = admissibility_margin(trial, opts);
      if (margin >= 0.0 && trial_margin < -opts.slack(std::abs(trial.mu))) {
        left_admissible = true;
        continue;
      }
      const double trial_norm = norm_of(trial);
      if (trial_norm < norm) {
        x = std::move(trial);
        norm = trial_norm;
        margin = trial_margin;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (left_admissible)
        throw Error(ErrorKind::LeftAdmissibleSet, "Newton iterate left the admissible set phi < mu");
      throw Error(ErrorKind::NoConvergence,
                  "damping floor reached without residual decrease (residual " +
                      std::to_string(norm) + ")");
    }
  }

  BranchPoint p;
  p.crest_gap = admissibility_margin(x, opts);
  if (p.crest_gap < -opts.slack(std::abs(x.mu)))
    throw Error(ErrorKind::Inadmissible,
                "converged state violates phi <= mu (crest gap " + std::to_string(p.crest_gap) + ")");
  p.s = x.phi[1];
  p.state = std::move(x);
  p.newton_residual = norm;
  p.iterations = it;
  p.chart = constraint.kind == Constraint::Kind::Amplitude ? Chart::Amplitude : Chart::CrestGap;
  return p;
}

// Linear predictor through two states at parameters t0, t1, evaluated at t.
SteadyState secant(const BranchPoint& p0, const BranchPoint& p1, double t0, double t1, double t) {
  const int n = std::max(p0.state.phi.modes(), p1.state.phi.modes());
  const CosineSeries a0 = p0.state.phi.resized(n);
  const CosineSeries a1 = p1.state.phi.resized(n);
  const double w = (t - t1) / (t1 - t0);
  return {a1 + w * (a1 - a0), p1.state.mu + w * (p1.state.mu - p0.state.mu)};
}

}  // namespace

const char* to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::CrestGap: return "crest_gap";
    case StopReason::MaxPoints: return "max_points";
    case StopReason::Stalled: return "stalled";
  }
  return "unknown";
}

double bifurcation_point(const MultiplierSymbol& symbol, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "wavenumber k must be >= 1");
  return symbol(k);
}

double mu2_coefficient(const MultiplierSymbol& symbol, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "wavenumber k must be >= 1");
  const double mk = symbol(k);
  return 1.0 / (4.0 * (mk - symbol(0.0))) + 1.0 / (8.0 * (mk - symbol(2.0 * k)));
}

LocalBifurcationData local_bifurcation_data(const MultiplierSymbol& symbol, int k) {
  LocalBifurcationData d;
  d.k = k;
  d.mu_star = bifurcation_point(symbol, k);
  // phi2 = 1/(4(m(k)-m(0))) + cos(2kx)/(4(m(k)-m(2k))); a_0 carries the factor 1/2.
  d.phi2 = CosineSeries(k, 2);
  d.phi2[0] = 2.0 / (4.0 * (d.mu_star - symbol(0.0)));
  d.phi2[2] = 1.0 / (4.0 * (d.mu_star - symbol(2.0 * k)));
  d.mu2 = mu2_coefficient(symbol, k);
  return d;
}

SteadyState asymptotic_branch(const MultiplierSymbol& symbol, int k, double eps, int modes) {
  if (modes < 2) throw Error(ErrorKind::InvalidArgument, "asymptotic branch needs >= 2 modes");
  const LocalBifurcationData d = local_bifurcation_data(symbol, k);
  CosineSeries phi = (eps * eps) * d.phi2.resized(modes);
  phi[1] = eps;
  return {std::move(phi), d.mu_star + eps * eps * d.mu2};
}

void ContinuationConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (!(alpha > 1.0)) fail("alpha must exceed 1");
  if (k < 1) fail("k must be >= 1");
  if (modes < 4 * k) fail("modes must be >= 4k");
  if (max_modes < modes) fail("max_modes must be >= modes");
  if (!(s_start > 0.0) || !(s_step > 0.0)) fail("s_start and s_step must be positive");
  if (!(step_control.grow >= 1.0) || !(step_control.shrink > 0.0 && step_control.shrink < 1.0))
    fail("step control needs grow >= 1 and 0 < shrink < 1");
  if (!(step_control.min_step > 0.0) || !(step_control.max_step >= step_control.min_step))
    fail("step control needs 0 < min_step <= max_step");
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (newton_max_iter < 1) fail("newton_max_iter must be >= 1");
  if (!(damping_floor > 0.0 && damping_floor <= 1.0)) fail("damping_floor must lie in (0, 1]");
  if (!(stop_crest_gap > 0.0)) fail("stop_crest_gap must be positive");
  if (!(escalate_crest_gap >= stop_crest_gap && escalate_crest_gap < 1.0))
    fail("escalate_crest_gap must lie in [stop_crest_gap, 1)");
  if (escalation_factor < 1) fail("escalation_factor must be >= 1");
  if (!(gap_reduction > 0.0 && gap_reduction < 1.0)) fail("gap_reduction must lie in (0, 1)");
  if (max_points < 1) fail("max_points must be >= 1");
  if (direction != 1 && direction != -1) fail("direction must be +1 or -1");
}

BranchPoint newton_correct(const SteadyState& guess, double s, const MultiplierSymbol& symbol,
                           const ContinuationConfig& config) {
  if (s == 0.0) throw Error(ErrorKind::InvalidArgument, "s = 0 is the trivial line");
  if (guess.phi.modes() < 2) throw Error(ErrorKind::InvalidArgument, "Newton needs >= 2 modes");
  return solve(guess, {Constraint::Kind::Amplitude, s}, symbol, config);
}

BranchPoint newton_correct_crest_gap(const SteadyState& guess, double gap,
                                     const MultiplierSymbol& symbol,
                                     const ContinuationConfig& config) {
  if (guess.phi.modes() < 2) throw Error(ErrorKind::InvalidArgument, "Newton needs >= 2 modes");
  const double sign = guess.phi[1] < 0.0 ? -1.0 : 1.0;
  return solve(guess, {Constraint::Kind::CrestGap, gap, sign}, symbol, config);
}

Check check_speed_window(std::span<const BranchPoint> branch) {
  std::vector<double> speeds;
  speeds.reserve(branch.size());
  for (const auto& p : branch) speeds.push_back(p.state.mu);
  return check_speed_window(std::span<const double>(speeds));
}

BranchRun continue_branch(const MultiplierSymbol& symbol, const ContinuationConfig& config) {
  config.validate();
  const int k = config.k;
  const double mk = bifurcation_point(symbol, k);
  const double dir = config.direction;
  const CheckOptions opts{config.newton_tol};

  BranchRun run;
  const MultiplierSymbol lattice = symbol.rescaled(k);
  run.lambda = lambda_constant(lattice, 65, default_kernel_modes(lattice));

  auto emit = [&](BranchPoint p) {
    if (config.run_diagnostics) {
      p.diagnostics = diagnose(p.state, run.lambda, opts);
      p.flagged = !p.diagnostics.all_pass();
    }
    run.points.push_back(std::move(p));
  };
  auto finish = [&](StopReason reason) {
    run.stopped_reason = reason;
    if (!run.points.empty()) run.speed_window = check_speed_window(std::span<const BranchPoint>(run.points));
    return run;
  };
  auto reached_stop = [&](const BranchPoint& p) {
    return p.crest_gap < config.stop_crest_gap * p.state.mu;
  };

  int modes = config.modes;
  const double s0 = dir * config.s_start * mk;
  try {
    emit(newton_correct(asymptotic_branch(symbol, k, s0, modes), s0, symbol, config));
  } catch (const Error&) {
    return finish(StopReason::Stalled);
  }

  // Amplitude chart.
  double ds = config.s_step * mk;
  const double min_step = config.step_control.min_step * mk;
  const double max_step = config.step_control.max_step * mk;
  while (true) {
    const BranchPoint& last = run.points.back();
    if (reached_stop(last)) return finish(StopReason::CrestGap);
    if (static_cast<int>(run.points.size()) >= config.max_points) return finish(StopReason::MaxPoints);
    if (last.crest_gap < config.escalate_crest_gap * last.state.mu) break;
    const double target = last.s + dir * ds;
    const std::size_t np = run.points.size();
    const SteadyState guess =
        np >= 2 ? secant(run.points[np - 2], last, run.points[np - 2].s, last.s, target) : last.state;
    try {
      BranchPoint p = newton_correct(guess, target, symbol, config);
      const bool fast = p.iterations <= config.step_control.fast_iterations;
      emit(std::move(p));
      if (fast) ds = std::min(ds * config.step_control.grow, max_step);
    } catch (const Error&) {
      ds *= config.step_control.shrink;
      if (ds < min_step) break;  // fold in the amplitude chart: hand over to the crest-gap chart
    }
  }

  // Mode escalation at the current point.
  if (modes < config.max_modes) {
    modes = std::min(modes * config.escalation_factor, config.max_modes);
    BranchPoint& last = run.points.back();
    const SteadyState projected{last.state.phi.resized(modes), last.state.mu};
    try {
      BranchPoint p = last.chart == Chart::Amplitude
                          ? newton_correct(projected, last.s, symbol, config)
                          : newton_correct_crest_gap(projected, last.crest_gap, symbol, config);
      p.chart = last.chart;
      run.points.pop_back();
      emit(std::move(p));
    } catch (const Error&) {
      return finish(StopReason::Stalled);
    }
  }

  // Crest-gap chart towards the highest wave.
  double reduction = config.gap_reduction;
  std::size_t chart_start = run.points.size() - 1;
  while (true) {
    const BranchPoint& last = run.points.back();
    if (reached_stop(last)) return finish(StopReason::CrestGap);
    if (static_cast<int>(run.points.size()) >= config.max_points) return finish(StopReason::MaxPoints);
    const double target = last.crest_gap * reduction;
    const std::size_t np = run.points.size();
    const SteadyState guess =
        np - chart_start >= 2
            ? secant(run.points[np - 2], last, run.points[np - 2].crest_gap, last.crest_gap, target)
            : last.state;
    try {
      emit(newton_correct_crest_gap(guess, target, symbol, config));
    } catch (const Error&) {
      reduction = std::sqrt(reduction);
      if (1.0 - reduction < 1e-6) return finish(StopReason::Stalled);
    }
  }
}

SteadyState extrapolate_highest(std::span<const BranchPoint> tail) {
  if (tail.size() < 3) throw Error(ErrorKind::InsufficientTail, "insufficient tail: need >= 3 points");
  for (std::size_t i = 1; i < tail.size(); ++i)
    if (!(tail[i].crest_gap < tail[i - 1].crest_gap))
      throw Error(ErrorKind::InsufficientTail, "insufficient tail: crest gap must strictly decrease");
  int n = 0;
  for (const auto& p : tail) n = std::max(n, p.state.phi.modes());
  const int k = tail.front().state.phi.base_wavenumber();

  // Intercept at gap = 0 of the least-squares line through (gap_i, y_i).
  const double count = static_cast<double>(tail.size());
  double mean_gap = 0.0;
  for (const auto& p : tail) mean_gap += p.crest_gap / count;
  double sxx = 0.0;
  for (const auto& p : tail) sxx += (p.crest_gap - mean_gap) * (p.crest_gap - mean_gap);
  auto intercept = [&](auto value_of) {
    double mean = 0.0, sxy = 0.0;
    for (const auto& p : tail) mean += value_of(p) / count;
    for (const auto& p : tail) sxy += (p.crest_gap - mean_gap) * (value_of(p) - mean);
    return mean - (sxy / sxx) * mean_gap;
  };

  CosineSeries phi(k, n);
  for (int j = 0; j <= n; ++j)
    phi[j] = intercept([j](const BranchPoint& p) { return j <= p.state.phi.modes() ? p.state.phi[j] : 0.0; });
  SteadyState limit{phi, intercept([](const BranchPoint& p) { return p.state.mu; })};
  limit.mu = crest_aligned(limit).phi.value_at_zero();
  return limit;
}

Mu2Estimate richardson_mu2(const MultiplierSymbol& symbol, int k, double s0,
                           const ContinuationConfig& config) {
  const double mk = bifurcation_point(symbol, k);
  const int modes = std::max(config.modes, 8);
  auto quotient = [&](double s) {
    const BranchPoint p = newton_correct(asymptotic_branch(symbol, k, s, modes), s, symbol, config);
    return (p.state.mu - mk) / (s * s);
  };
  Mu2Estimate e;
  e.formula = mu2_coefficient(symbol, k);
  e.richardson = (4.0 * quotient(0.5 * s0) - quotient(s0)) / 3.0;
  e.relative_error = std::abs(e.richardson - e.formula) / std::abs(e.formula);
  return e;
}

}  // namespace fkdv
