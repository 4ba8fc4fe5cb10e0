#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fkdv {

/// Bessel multiplier m(xi) = (1 + (q*xi)^2)^(-alpha/2).
///
/// The lattice scale q is 1 for the symbol itself. q = k gives the symbol
/// seen by a 2*pi/k-periodic wave after the substitution y = k x, which is
/// how the crest-to-trough estimates are transported to higher wavenumbers.
class MultiplierSymbol {
 public:
  /// Throws Error(InvalidArgument) unless alpha > 1 and scale >= 1.
  explicit MultiplierSymbol(double alpha, int scale = 1);

  double alpha() const noexcept { return alpha_; }
  int scale() const noexcept { return scale_; }

  double operator()(double xi) const noexcept;

  MultiplierSymbol rescaled(int k) const { return MultiplierSymbol(alpha_, scale_ * k); }

 private:
  double alpha_;
  int scale_;
};

double eval_symbol(const MultiplierSymbol& symbol, double xi) noexcept;

/// Upper bound on (1/2pi) * sum_{|n|>N} m(n), hence on the sup-norm
/// truncation error of the N-mode kernel partial sum. Uses
/// sum_{n>N} (1+q^2 n^2)^(-a/2) <= q^-a * integral_N^inf t^-a dt.
double kernel_series_tail_bound(const MultiplierSymbol& symbol, int modes);

/// Pointwise refinement of the tail bound away from the origin: for
/// decreasing weights, |sum_{n>N} m(n) cos(n x)| <= m(N+1)/|sin(x/2)|.
/// Never larger than kernel_series_tail_bound.
double kernel_pointwise_tail_bound(const MultiplierSymbol& symbol, int modes, double x);

/// Smallest power of two whose tail bound meets 1e-10 (alpha >= 2) or 1e-6
/// (alpha < 2), capped at kMaxKernelModes.
int default_kernel_modes(const MultiplierSymbol& symbol);
inline constexpr int kMaxKernelModes = 1 << 20;

/// Partial sum (1/2pi)(m(0) + 2 sum_{n=1}^N m(n) cos(n x)).
double eval_kernel(const MultiplierSymbol& symbol, double x, int modes);

/// Sine series -(1/pi) sum n m(n) sigma_n sin(n x). For alpha <= 2 the
/// Lanczos factors sigma_n = sinc(n pi/(N+1)) are applied; otherwise
/// sigma_n = 1. Throws Error(NearSingularity) when |x| < x_min.
double eval_kernel_derivative(const MultiplierSymbol& symbol, double x, int modes,
                              double x_min);

/// Samples of the kernel partial sum at x_i = i*pi/M, i = 0..M.
std::vector<double> sample_kernel(const MultiplierSymbol& symbol, int intervals, int modes);

struct KernelTable {
  double alpha = 0.0;
  int scale = 1;
  std::vector<double> grid;               // i*pi/G, i = 1..G
  std::vector<double> values;             // K_P at grid
  std::vector<double> derivative_values;  // K_P' at grid
  double value_at_zero = 0.0;
  int truncation_modes = 0;
  double tail_bound = 0.0;

  int resolution() const noexcept { return static_cast<int>(grid.size()); }
};

/// Throws Error(InvalidArgument) for grid_resolution < 1 or modes < 1.
KernelTable make_kernel_table(const MultiplierSymbol& symbol, int grid_resolution, int modes);

struct PropertyCheck {
  std::string check;
  bool pass = false;
  double margin = 0.0;
};

struct KernelPropertyReport {
  std::vector<PropertyCheck> checks;
  /// Fitted exponent of K_P(0) - K_P(x) near the origin; reported only.
  std::optional<double> holder_exponent;

  bool all_pass() const noexcept;
  const PropertyCheck* find(const std::string& name) const noexcept;
};

/// Positivity, evenness, monotone decrease on (0, pi], unit period integral
/// and the sign of K_P'. Failures are reported, never thrown (except for
/// grid_resolution < 8 or modes < 1, which are argument errors).
KernelPropertyReport certify_kernel_properties(const MultiplierSymbol& symbol,
                                               int grid_resolution, int modes);

/// lambda = 1/2 min over a closed grid on [pi/4, 3pi/4]^2 of
/// K_P(x - y) - K_P(x + y). Throws Error(NonpositiveLambda) if the minimum
/// is not positive.
double lambda_constant(const MultiplierSymbol& symbol, int grid_resolution, int modes);

/// Least-squares slope of log(K_P(0) - K_P(x)) against log x on a
/// geometric window well above the truncation scale.
double kernel_holder_exponent(const MultiplierSymbol& symbol, int modes);

}  // namespace fkdv
