#include "fkdv/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fkdv/error.hpp"
#include "fkdv/transforms.hpp"

namespace fkdv {
namespace {

constexpr double kPi = std::numbers::pi;

void require_modes(int modes) {
  if (modes < 1) throw Error(ErrorKind::InvalidArgument, "kernel modes must be >= 1");
}

// For alpha <= 2 the differentiated series converges only conditionally.
double sigma_factor(const MultiplierSymbol& symbol, int n, int modes) {
  if (symbol.alpha() > 2.0) return 1.0;
  const double t = n * kPi / (modes + 1.0);
  return std::sin(t) / t;
}

std::vector<double> kernel_coefficients(const MultiplierSymbol& symbol, int modes) {
  std::vector<double> a(static_cast<std::size_t>(modes) + 1);
  for (int n = 0; n <= modes; ++n) a[static_cast<std::size_t>(n)] = symbol(n) / kPi;
  return a;
}

std::vector<double> kernel_derivative_coefficients(const MultiplierSymbol& symbol, int modes) {
  std::vector<double> b(static_cast<std::size_t>(modes) + 1, 0.0);
  for (int n = 1; n <= modes; ++n)
    b[static_cast<std::size_t>(n)] = -n * symbol(n) * sigma_factor(symbol, n, modes) / kPi;
  return b;
}

// Synthesis on a grid fine enough for `modes`, subsampled back to `intervals`.
template <typename Synth>
std::vector<double> sample_refined(const std::vector<double>& coeffs, int intervals, Synth synth) {
  const int modes = static_cast<int>(coeffs.size()) - 1;
  const int refine = std::max(1, (modes + intervals - 1) / intervals);
  const auto fine = synth(coeffs, intervals * refine);
  std::vector<double> out(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i)
    out[static_cast<std::size_t>(i)] = fine[static_cast<std::size_t>(i) * refine];
  return out;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

MultiplierSymbol::MultiplierSymbol(double alpha, int scale) : alpha_(alpha), scale_(scale) {
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw Error(ErrorKind::InvalidArgument, "alpha must exceed 1");
  if (scale < 1) throw Error(ErrorKind::InvalidArgument, "symbol lattice scale must be >= 1");
}

double MultiplierSymbol::operator()(double xi) const noexcept {
  const double t = scale_ * xi;
  return std::pow(1.0 + t * t, -0.5 * alpha_);
}

double eval_symbol(const MultiplierSymbol& symbol, double xi) noexcept { return symbol(xi); }

double kernel_series_tail_bound(const MultiplierSymbol& symbol, int modes) {
  require_modes(modes);
  const double a = symbol.alpha();
  const double tail = std::pow(static_cast<double>(symbol.scale()), -a) *
                      std::pow(static_cast<double>(modes), 1.0 - a) / (a - 1.0);
  return tail / kPi;
}

double kernel_pointwise_tail_bound(const MultiplierSymbol& symbol, int modes, double x) {
  const double uniform = kernel_series_tail_bound(symbol, modes);
  const double s = std::abs(std::sin(0.5 * std::remainder(x, 2.0 * kPi)));
  if (s == 0.0) return uniform;
  return std::min(uniform, symbol(modes + 1.0) / (kPi * s));
}

int default_kernel_modes(const MultiplierSymbol& symbol) {
  const double target = symbol.alpha() >= 2.0 ? 1e-10 : 1e-6;
  int modes = 16;
  while (modes < kMaxKernelModes && kernel_series_tail_bound(symbol, modes) > target) modes *= 2;
  return modes;
}

double eval_kernel(const MultiplierSymbol& symbol, double x, int modes) {
  require_modes(modes);
  const double theta = std::remainder(x, 2.0 * kPi);
  double sum = 0.0;
  for (int n = modes; n >= 1; --n) sum += symbol(n) * std::cos(n * theta);
  return (1.0 + 2.0 * sum) / (2.0 * kPi);
}

double eval_kernel_derivative(const MultiplierSymbol& symbol, double x, int modes, double x_min) {
  require_modes(modes);
  const double theta = std::remainder(x, 2.0 * kPi);
  if (std::abs(theta) < x_min)
    throw Error(ErrorKind::NearSingularity,
                "kernel derivative requested at |x| = " + std::to_string(std::abs(theta)) +
                    " below x_min = " + std::to_string(x_min));
  double sum = 0.0;
  for (int n = modes; n >= 1; --n)
    sum += n * symbol(n) * sigma_factor(symbol, n, modes) * std::sin(n * theta);
  return -sum / kPi;
}

std::vector<double> sample_kernel(const MultiplierSymbol& symbol, int intervals, int modes) {
  require_modes(modes);
  return sample_refined(kernel_coefficients(symbol, modes), intervals,
                        [](const std::vector<double>& c, int m) {
                          return transforms::cosine_synthesis(c, m);
                        });
}

KernelTable make_kernel_table(const MultiplierSymbol& symbol, int grid_resolution, int modes) {
  require_modes(modes);
  if (grid_resolution < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be >= 1");
  KernelTable table;
  table.alpha = symbol.alpha();
  table.scale = symbol.scale();
  table.truncation_modes = modes;
  table.tail_bound = kernel_series_tail_bound(symbol, modes);

  const auto values = sample_kernel(symbol, grid_resolution, modes);
  const auto slopes = sample_refined(kernel_derivative_coefficients(symbol, modes),
                                     grid_resolution, [](const std::vector<double>& c, int m) {
                                       return transforms::sine_synthesis(c, m);
                                     });
  table.value_at_zero = values[0];
  for (int i = 1; i <= grid_resolution; ++i) {
    table.grid.push_back(i * kPi / grid_resolution);
    table.values.push_back(values[static_cast<std::size_t>(i)]);
    table.derivative_values.push_back(slopes[static_cast<std::size_t>(i)]);
  }
  return table;
}

bool KernelPropertyReport::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck* KernelPropertyReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks)
    if (c.check == name) return &c;
  return nullptr;
}

KernelPropertyReport certify_kernel_properties(const MultiplierSymbol& symbol,
                                               int grid_resolution, int modes) {
  if (grid_resolution < 8)
    throw Error(ErrorKind::InvalidArgument, "certification grid resolution must be >= 8");
  const KernelTable table = make_kernel_table(symbol, grid_resolution, modes);
  const int g = table.resolution();
  KernelPropertyReport report;

  double min_value = table.value_at_zero;
  for (double v : table.values) min_value = std::min(min_value, v);
  report.checks.push_back({"positivity", min_value > 0.0, min_value});

  // Direct evaluation at both signs, on at most 64 grid points.
  const int stride = std::max(1, g / 64);
  double asym = 0.0;
  for (int i = 0; i < g; i += stride) {
    const double x = table.grid[static_cast<std::size_t>(i)];
    asym = std::max(asym, std::abs(eval_kernel(symbol, x, modes) - eval_kernel(symbol, -x, modes)));
  }
  report.checks.push_back({"evenness", asym == 0.0, 0.0 - asym});

  // Consecutive differences, each allowed the truncation error of both ends.
  double mono = table.value_at_zero - table.values[0] + table.tail_bound +
                kernel_pointwise_tail_bound(symbol, modes, table.grid[0]);
  for (int i = 0; i + 1 < g; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double slack = kernel_pointwise_tail_bound(symbol, modes, table.grid[u]) +
                         kernel_pointwise_tail_bound(symbol, modes, table.grid[u + 1]);
    mono = std::min(mono, table.values[u] - table.values[u + 1] + slack);
  }
  report.checks.push_back({"monotone_decrease", mono > 0.0, mono});

  // Trapezoidal rule with more points than modes integrates the partial sum exactly.
  const int quad_intervals = std::max(modes + 1, 2 * grid_resolution);
  const auto fine = sample_kernel(symbol, quad_intervals, modes);
  double integral = 0.5 * (fine.front() + fine.back());
  for (std::size_t i = 1; i + 1 < fine.size(); ++i) integral += fine[i];
  integral *= 2.0 * kPi / quad_intervals;
  const double tol = symbol.alpha() >= 2.0 ? 1e-8 : 1e-6;
  const double integral_margin = tol - std::abs(integral - 1.0);
  report.checks.push_back({"unit_integral", integral_margin > 0.0, integral_margin});

  double max_slope = -std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < g; ++i)
    max_slope = std::max(max_slope, table.derivative_values[static_cast<std::size_t>(i)]);
  report.checks.push_back({"derivative_nonpositive", max_slope < 0.0, -max_slope});

  report.holder_exponent = kernel_holder_exponent(symbol, modes);
  return report;
}

double lambda_constant(const MultiplierSymbol& symbol, int grid_resolution, int modes) {
  if (grid_resolution < 8)
    throw Error(ErrorKind::InvalidArgument, "lambda grid resolution must be >= 8");
  const int last = grid_resolution - 1;
  // Nodes pi/4 + i h, h = (pi/2)/last; x - y and x + y are multiples of h.
  const int intervals = 2 * last;
  const auto k = sample_kernel(symbol, intervals, modes);
  auto at = [&](int idx) {
    idx = std::abs(idx);
    if (idx > intervals) idx = 2 * intervals - idx;
    return k[static_cast<std::size_t>(idx)];
  };
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= last; ++i)
    for (int j = 0; j <= last; ++j) min_gap = std::min(min_gap, at(i - j) - at(last + i + j));
  if (!(min_gap > 0.0))
    throw Error(ErrorKind::NonpositiveLambda,
                "nonpositive lambda (min kernel gap " + std::to_string(min_gap) +
                    "): increase modes or resolution");
  return 0.5 * min_gap;
}

double kernel_holder_exponent(const MultiplierSymbol& symbol, int modes) {
  require_modes(modes);
  const double lo = std::min(32.0 * kPi / modes, 0.05);
  const double hi = kPi / 8.0;
  const int samples = 12;
  const double k0 = eval_kernel(symbol, 0.0, modes);
  std::vector<double> lx, ly;
  for (int i = 0; i < samples; ++i) {
    const double x = lo * std::pow(hi / lo, i / (samples - 1.0));
    const double d = k0 - eval_kernel(symbol, x, modes);
    if (d <= 0.0) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(d));
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return least_squares_slope(lx, ly);
}

}  // namespace fkdv
