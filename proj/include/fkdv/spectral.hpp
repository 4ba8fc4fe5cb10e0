#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "fkdv/kernel.hpp"

namespace fkdv {

/// Even, 2*pi/k-periodic function phi(x) = a_0/2 + sum_{j=1}^N a_j cos(j k x).
class CosineSeries {
 public:
  /// Zero series with modes N (coefficients a_0..a_N).
  CosineSeries(int base_wavenumber, int modes);
  /// Throws Error(InvalidArgument) for k < 1, an empty list or a
  /// non-finite coefficient.
  CosineSeries(int base_wavenumber, std::vector<double> coeffs);

  int base_wavenumber() const noexcept { return k_; }
  int modes() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](int j) const noexcept { return coeffs_[static_cast<std::size_t>(j)]; }
  double& operator[](int j) noexcept { return coeffs_[static_cast<std::size_t>(j)]; }

  double value_at_zero() const noexcept;
  double max_abs_coeff() const noexcept;
  bool is_zero() const noexcept;

  /// Zero-padded or truncated copy with the given mode count.
  CosineSeries resized(int modes) const;
  /// phi(x + pi/k): a_j -> (-1)^j a_j.
  CosineSeries half_period_shift() const;

  friend CosineSeries operator+(const CosineSeries& a, const CosineSeries& b);
  friend CosineSeries operator-(const CosineSeries& a, const CosineSeries& b);
  friend CosineSeries operator*(double c, const CosineSeries& a);

 private:
  int k_;
  std::vector<double> coeffs_;
};

struct SteadyState {
  CosineSeries phi{1, 0};
  double mu = 0.0;
};

double eval_series(const CosineSeries& phi, double x);

/// phi at x_i = i*pi/(k M), i = 0..M: a half period sampled with M intervals,
/// i.e. 2M points per period.
std::vector<double> sample_half_period(const CosineSeries& phi, int intervals);

/// Derivative d^order phi/dx^order at the same points as sample_half_period.
std::vector<double> sample_derivative(const CosineSeries& phi, int order, int intervals);

/// Multiplier applied diagonally: a_j -> m(j k) a_j.
CosineSeries apply_L(const CosineSeries& phi, const MultiplierSymbol& symbol);

/// Trapezoidal periodic convolution int K_P(x - y) f(y) dy on the uniform
/// grid x_i = -pi + i*pi/G, i = 0..2G-1, with G = table.resolution().
/// Throws Error(GridMismatch) unless samples.size() == 2G.
std::vector<double> apply_L_quadrature(std::span<const double> samples, const KernelTable& table);

/// Bound on |apply_L_quadrature - L f| for f = phi sampled on the table's
/// grid: kernel truncation (2pi * tail * sup|f|) plus aliasing of the
/// trapezoidal rule on 2G points.
double quadrature_error_estimate(const CosineSeries& phi, const KernelTable& table);

/// Pointwise product, alias-free up to 2N and truncated to N modes.
/// Throws Error(BaseMismatch) for different base wavenumbers.
CosineSeries multiply(const CosineSeries& phi, const CosineSeries& psi);

/// Coefficients of mu phi - L phi - phi^2/2.
CosineSeries residual(const SteadyState& state, const MultiplierSymbol& symbol);

/// Matrix of v -> (mu - phi) v - L v on coefficients a_0..a_N.
Eigen::MatrixXd jacobian_matrix(const SteadyState& state, const MultiplierSymbol& symbol);

/// sum_j j^beta |a_j|: a coefficient-decay surrogate for Hoelder-type norms.
double decay_weighted_norm(const CosineSeries& phi, double beta);

}  // namespace fkdv
