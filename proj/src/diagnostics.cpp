#include "fkdv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fkdv/error.hpp"

namespace fkdv {
namespace {

constexpr double kPi = std::numbers::pi;

struct GridStats {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  double sup = 0.0;
};

GridStats grid_stats(const CosineSeries& phi, int grid_factor) {
  GridStats g;
  g.values = sample_half_period(phi, grid_factor * std::max(phi.modes(), 1));
  const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
  g.min = *lo;
  g.max = *hi;
  g.sup = std::max(std::abs(g.min), std::abs(g.max));
  return g;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

Check not_applicable(std::string name, std::string why) {
  return {std::move(name), true, 0.0, std::move(why), false};
}

}  // namespace

bool DiagnosticsReport::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* DiagnosticsReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

SteadyState crest_aligned(const SteadyState& state) {
  if (state.phi.modes() >= 1 && state.phi[1] < 0.0) return {state.phi.half_period_shift(), state.mu};
  return state;
}

double crest_gap(const SteadyState& state, int grid_factor) {
  return state.mu - grid_stats(state.phi, grid_factor).max;
}

Check check_apriori_bounds(const SteadyState& state, const CheckOptions& options) {
  const GridStats g = grid_stats(state.phi, options.grid_factor);
  const double two = 2.0 * (state.mu - 1.0);
  double left, middle, right;
  if (state.mu > 1.0) {
    left = g.min;
    middle = two - g.min;
    right = g.max - two;
  } else {
    left = g.min - two;
    middle = -g.min;
    right = g.max;
  }
  // A constant solution sits on the other root of phi (phi/2 - (mu - 1)) >= 0.
  const double slack = options.slack(g.sup);
  if (g.max - g.min <= slack) right = std::max(right, g.max * (0.5 * g.max - (state.mu - 1.0)));
  const double margin = std::min({left, middle, right});
  return {"apriori_bounds", margin >= -slack, margin,
          "min phi = " + fmt(g.min) + ", max phi = " + fmt(g.max) + ", 2(mu-1) = " + fmt(two)};
}

Check check_linf_bound(const SteadyState& state, const CheckOptions& options) {
  const GridStats g = grid_stats(state.phi, options.grid_factor);
  // ||K||_1 = m(0) = 1 for a positive kernel with unit integral.
  const double bound = 2.0 * (state.mu + 1.0);
  const double margin = bound - g.sup;
  return {"linf_bound", margin >= -options.slack(g.sup), margin,
          "sup|phi| = " + fmt(g.sup) + " vs 2(mu + 1) = " + fmt(bound)};
}

double second_derivative_at_crest(const SteadyState& state) {
  const SteadyState s = crest_aligned(state);
  const int k = s.phi.base_wavenumber();
  double sum = 0.0;
  for (int j = s.phi.modes(); j >= 1; --j) {
    const double w = static_cast<double>(j) * k;
    sum -= w * w * s.phi[j];
  }
  return sum;
}

Check check_monotone_half_period(const SteadyState& state, const CheckOptions& options) {
  if (state.phi.is_zero()) return not_applicable("monotone_half_period", "trivial state");
  const SteadyState s = crest_aligned(state);
  const int intervals = options.grid_factor * std::max(s.phi.modes(), 1);
  const auto values = sample_half_period(s.phi, intervals);
  const auto slopes = sample_derivative(s.phi, 1, intervals);
  double sup = 0.0, max_slope = -std::numeric_limits<double>::infinity(), max_interior = values[1];
  double lipschitz = 0.0;
  for (double v : values) sup = std::max(sup, std::abs(v));
  for (int i = 1; i < intervals; ++i) {
    const auto u = static_cast<std::size_t>(i);
    max_slope = std::max(max_slope, slopes[u]);
    max_interior = std::max(max_interior, values[u]);
    lipschitz = std::max(lipschitz, std::abs(slopes[u]));
  }
  const double slack = options.slack(sup);
  const double below_speed = s.mu - max_interior;
  const double curvature = second_derivative_at_crest(s);
  const double gap = s.mu - values[0];
  const bool curvature_checked = gap > 10.0 * slack;
  const bool pass = max_slope < slack && below_speed > -slack && (!curvature_checked || curvature < 0.0);
  double margin = std::min(-max_slope, below_speed);
  if (curvature_checked) margin = std::min(margin, -curvature);
  return {"monotone_half_period", pass, margin,
          "max phi' = " + fmt(max_slope) + ", mu - max phi = " + fmt(below_speed) +
              ", phi''(0) = " + fmt(curvature) + (curvature_checked ? "" : " (not checked)") +
              ", max |phi'| = " + fmt(lipschitz)};
}

Check check_speed_window(std::span<const double> speeds) {
  if (speeds.empty()) throw Error(ErrorKind::InvalidArgument, "speed window needs a nonempty branch");
  const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
  const double margin = std::min(*lo, 1.0 - *hi);
  return {"speed_window", *lo > 0.0 && *hi < 1.0, margin,
          "min mu = " + fmt(*lo) + ", max mu = " + fmt(*hi)};
}

Check check_trough_gap(const SteadyState& state, double lambda, const CheckOptions& options) {
  const SteadyState s = crest_aligned(state);
  const GridStats g = grid_stats(s.phi, options.grid_factor);
  const double trough = g.values.back();
  const double margin = s.mu - trough - lambda * kPi;
  return {"trough_gap", margin >= -options.slack(g.sup), margin,
          "mu - phi(trough) = " + fmt(s.mu - trough) + " vs lambda*pi = " + fmt(lambda * kPi)};
}

Check smoothness_proxy(const SteadyState& state, const CheckOptions& options) {
  const CosineSeries& phi = state.phi;
  if (phi.modes() < 48)
    throw Error(ErrorKind::InsufficientModes,
                "smoothness proxy needs >= 48 modes (16 in the upper third)");
  if (phi.is_zero()) return not_applicable("smoothness_proxy", "trivial state");
  const double floor = 1e-13 * phi.max_abs_coeff();
  int last = 0;
  for (int j = 1; j <= phi.modes(); ++j)
    if (std::abs(phi[j]) > floor) last = j;

  const double gap = crest_gap(state, options.grid_factor);
  if (gap >= 0.1 * state.mu) {
    // Exponential regime: slope of log|a_j| against j over the resolved range.
    const int first = last >= 48 ? (2 * last) / 3 : 1;
    std::vector<double> js, ls;
    for (int j = first; j <= last; ++j) {
      if (std::abs(phi[j]) <= floor) continue;
      js.push_back(j);
      ls.push_back(std::log(std::abs(phi[j])));
    }
    if (js.size() < 2)
      return {"smoothness_proxy", true, 1.0,
              "coefficients reach roundoff by j = " + std::to_string(last)};
    const double s = slope(js, ls);
    return {"smoothness_proxy", s < 0.0, -s,
            "log|a_j| slope " + fmt(s) + " over j in [" + std::to_string(first) + ", " +
                std::to_string(last) + "]"};
  }
  // Algebraic regime: |a_j| ~ j^-p over the upper third of the spectrum.
  std::vector<double> lj, ls;
  for (int j = (2 * phi.modes()) / 3; j <= phi.modes(); ++j) {
    if (std::abs(phi[j]) <= floor) continue;
    lj.push_back(std::log(static_cast<double>(j)));
    ls.push_back(std::log(std::abs(phi[j])));
  }
  if (lj.size() < 3)
    return {"smoothness_proxy", true, 1.0, "upper third below roundoff; decay faster than algebraic"};
  const double rate = -slope(lj, ls);
  return {"smoothness_proxy", rate > 1.0, rate - 1.0, "algebraic decay rate " + fmt(rate)};
}

double crest_exponent(const SteadyState& state, const CrestWindow& window) {
  const SteadyState s = crest_aligned(state);
  const int k = s.phi.base_wavenumber();
  const int n = std::max(s.phi.modes(), 1);
  const double lo = window.x_lo > 0.0 ? window.x_lo : 4.0 * kPi / (static_cast<double>(k) * n);
  const double hi = window.x_hi > 0.0 ? window.x_hi : kPi / (8.0 * k);
  if (!(hi >= 2.0 * lo) || window.samples < 12)
    throw Error(ErrorKind::WindowTooNarrow, "crest exponent window too narrow: [" + fmt(lo) +
                                                ", " + fmt(hi) + "] with " +
                                                std::to_string(window.samples) + " samples");
  const double top = s.phi.value_at_zero();
  std::vector<double> lx, ly;
  for (int i = 0; i < window.samples; ++i) {
    const double x = lo * std::pow(hi / lo, i / (window.samples - 1.0));
    const double drop = top - eval_series(s.phi, x);
    if (!(drop > 0.0)) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(drop));
  }
  if (lx.size() < 3) throw Error(ErrorKind::WindowTooNarrow, "crest exponent: profile flat in window");
  return slope(lx, ly);
}

DiagnosticsReport diagnose(const SteadyState& state, double lambda, const CheckOptions& options) {
  DiagnosticsReport report;
  report.checks.push_back(check_apriori_bounds(state, options));
  report.checks.push_back(check_linf_bound(state, options));
  report.checks.push_back(check_monotone_half_period(state, options));
  report.checks.push_back(check_trough_gap(state, lambda, options));
  try {
    report.checks.push_back(smoothness_proxy(state, options));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientModes) throw;
    report.checks.push_back(not_applicable("smoothness_proxy", e.what()));
  }
  if (!state.phi.is_zero()) {
    report.second_derivative_at_crest = second_derivative_at_crest(state);
    try {
      report.crest_exponent = crest_exponent(state);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::WindowTooNarrow) throw;
    }
  }
  return report;
}

}  // namespace fkdv
