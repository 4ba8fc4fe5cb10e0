#include "fkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fkdv/error.hpp"
#include "fkdv/transforms.hpp"

namespace fkdv {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> refined_synthesis(const std::vector<double>& coeffs, int intervals, bool sine) {
  const int modes = static_cast<int>(coeffs.size()) - 1;
  const int refine = std::max(1, (modes + intervals - 1) / intervals);
  const auto fine = sine ? transforms::sine_synthesis(coeffs, intervals * refine)
                         : transforms::cosine_synthesis(coeffs, intervals * refine);
  if (refine == 1) return fine;
  std::vector<double> out(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i)
    out[static_cast<std::size_t>(i)] = fine[static_cast<std::size_t>(i) * refine];
  return out;
}

void require_same_base(const CosineSeries& a, const CosineSeries& b) {
  if (a.base_wavenumber() != b.base_wavenumber())
    throw Error(ErrorKind::BaseMismatch, "cosine series have different base wavenumbers (" +
                                             std::to_string(a.base_wavenumber()) + " vs " +
                                             std::to_string(b.base_wavenumber()) + ")");
}

CosineSeries combine(const CosineSeries& a, const CosineSeries& b, double sign) {
  require_same_base(a, b);
  const int n = std::max(a.modes(), b.modes());
  CosineSeries out = a.resized(n);
  for (int j = 0; j <= b.modes(); ++j) out[j] += sign * b[j];
  return out;
}

}  // namespace

CosineSeries::CosineSeries(int base_wavenumber, int modes)
    : CosineSeries(base_wavenumber, std::vector<double>(static_cast<std::size_t>(std::max(modes, 0)) + 1, 0.0)) {}

CosineSeries::CosineSeries(int base_wavenumber, std::vector<double> coeffs)
    : k_(base_wavenumber), coeffs_(std::move(coeffs)) {
  if (k_ < 1) throw Error(ErrorKind::InvalidArgument, "base wavenumber must be >= 1");
  if (coeffs_.empty()) throw Error(ErrorKind::InvalidArgument, "cosine series needs a_0");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite cosine coefficient");
}

double CosineSeries::value_at_zero() const noexcept {
  double sum = 0.0;
  for (std::size_t j = coeffs_.size() - 1; j >= 1; --j) sum += coeffs_[j];
  return 0.5 * coeffs_[0] + sum;
}

double CosineSeries::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool CosineSeries::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

CosineSeries CosineSeries::resized(int modes) const {
  std::vector<double> c(static_cast<std::size_t>(modes) + 1, 0.0);
  std::copy_n(coeffs_.begin(), std::min(c.size(), coeffs_.size()), c.begin());
  return CosineSeries(k_, std::move(c));
}

CosineSeries CosineSeries::half_period_shift() const {
  CosineSeries out = *this;
  for (std::size_t j = 1; j < coeffs_.size(); j += 2) out.coeffs_[j] = -out.coeffs_[j];
  return out;
}

CosineSeries operator+(const CosineSeries& a, const CosineSeries& b) { return combine(a, b, 1.0); }
CosineSeries operator-(const CosineSeries& a, const CosineSeries& b) { return combine(a, b, -1.0); }

CosineSeries operator*(double c, const CosineSeries& a) {
  CosineSeries out = a;
  for (double& v : out.coeffs_) v *= c;
  return out;
}

double eval_series(const CosineSeries& phi, double x) {
  const double theta = std::remainder(phi.base_wavenumber() * x, 2.0 * kPi);
  double sum = 0.0;
  for (int j = phi.modes(); j >= 1; --j) sum += phi[j] * std::cos(j * theta);
  return 0.5 * phi[0] + sum;
}

std::vector<double> sample_half_period(const CosineSeries& phi, int intervals) {
  return refined_synthesis({phi.coeffs().begin(), phi.coeffs().end()}, intervals, false);
}

std::vector<double> sample_derivative(const CosineSeries& phi, int order, int intervals) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be >= 0");
  if (order == 0) return sample_half_period(phi, intervals);
  // d^p/dx^p cos(w x) = w^p cos(w x + p pi/2).
  const double sign = (order % 4 == 1 || order % 4 == 2) ? -1.0 : 1.0;
  std::vector<double> c(static_cast<std::size_t>(phi.modes()) + 1, 0.0);
  for (int j = 1; j <= phi.modes(); ++j)
    c[static_cast<std::size_t>(j)] =
        sign * std::pow(static_cast<double>(j) * phi.base_wavenumber(), order) * phi[j];
  return refined_synthesis(c, intervals, order % 2 == 1);
}

CosineSeries apply_L(const CosineSeries& phi, const MultiplierSymbol& symbol) {
  CosineSeries out = phi;
  const int k = phi.base_wavenumber();
  for (int j = 1; j <= phi.modes(); ++j) out[j] *= symbol(static_cast<double>(j) * k);
  return out;
}

std::vector<double> apply_L_quadrature(std::span<const double> samples, const KernelTable& table) {
  const int g = table.resolution();
  if (samples.size() != 2 * static_cast<std::size_t>(g))
    throw Error(ErrorKind::GridMismatch,
                "quadrature expects " + std::to_string(2 * g) + " samples on [-pi, pi), got " +
                    std::to_string(samples.size()));
  const int p = 2 * g;
  std::vector<double> kernel(static_cast<std::size_t>(g) + 1);
  kernel[0] = table.value_at_zero;
  std::copy(table.values.begin(), table.values.end(), kernel.begin() + 1);
  const double h = kPi / g;
  std::vector<double> out(samples.size(), 0.0);
  for (int i = 0; i < p; ++i) {
    double acc = 0.0;
    for (int j = 0; j < p; ++j) {
      int d = std::abs(i - j);
      if (d > g) d = p - d;
      acc += kernel[static_cast<std::size_t>(d)] * samples[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = h * acc;
  }
  return out;
}

double quadrature_error_estimate(const CosineSeries& phi, const KernelTable& table) {
  const MultiplierSymbol symbol(table.alpha, table.scale);
  const int p = 2 * table.resolution();
  const double a = symbol.alpha();
  // sum_{n >= n0} m(n) <= m(n0) + q^-a n0^(1-a)/(a-1)
  auto tail_from = [&](int n0) {
    return symbol(n0) + std::pow(static_cast<double>(symbol.scale()), -a) *
                            std::pow(static_cast<double>(n0), 1.0 - a) / (a - 1.0);
  };
  const int k = phi.base_wavenumber();
  const int top = phi.modes() * k;
  if (top >= p) return std::numeric_limits<double>::infinity();
  double aliasing = std::abs(phi[0]) * tail_from(p);
  for (int j = 1; j <= phi.modes(); ++j) aliasing += 2.0 * std::abs(phi[j]) * tail_from(p - j * k);
  double truncation = 0.0;
  if (top > table.truncation_modes) {
    double sup = 0.5 * std::abs(phi[0]);
    for (int j = 1; j <= phi.modes(); ++j) sup += std::abs(phi[j]);
    truncation = 2.0 * kPi * table.tail_bound * sup;
  }
  return aliasing + truncation;
}

CosineSeries multiply(const CosineSeries& phi, const CosineSeries& psi) {
  require_same_base(phi, psi);
  const int n = std::max(phi.modes(), psi.modes());
  const int intervals = 4 * std::max(n, 1);
  const auto u = transforms::cosine_synthesis(phi.coeffs(), intervals);
  const auto v = transforms::cosine_synthesis(psi.coeffs(), intervals);
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] * v[i];
  auto c = transforms::cosine_analysis(w);
  c.resize(static_cast<std::size_t>(n) + 1);
  return CosineSeries(phi.base_wavenumber(), std::move(c));
}

CosineSeries residual(const SteadyState& state, const MultiplierSymbol& symbol) {
  const CosineSeries& phi = state.phi;
  const CosineSeries lphi = apply_L(phi, symbol);
  const CosineSeries sq = multiply(phi, phi);
  CosineSeries out(phi.base_wavenumber(), phi.modes());
  for (int j = 0; j <= phi.modes(); ++j) out[j] = state.mu * phi[j] - lphi[j] - 0.5 * sq[j];
  return out;
}

Eigen::MatrixXd jacobian_matrix(const SteadyState& state, const MultiplierSymbol& symbol) {
  const CosineSeries& phi = state.phi;
  const int n = phi.modes();
  const int k = phi.base_wavenumber();
  // Coefficients of g = mu - phi, zero beyond N.
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n + 1);
  for (int j = 0; j <= n; ++j) g(j) = -phi[j];
  g(0) += 2.0 * state.mu;

  // (g cos(l y))_j = (g_|j-l| + g_(j+l)) / 2; the a_0 basis function is 1/2.
  Eigen::MatrixXd jac(n + 1, n + 1);
  for (int l = 0; l <= n; ++l) {
    for (int j = 0; j <= n; ++j)
      jac(j, l) = l == 0 ? 0.5 * g(j) : 0.5 * (g(std::abs(j - l)) + g(j + l));
  }
  for (int j = 0; j <= n; ++j) jac(j, j) -= symbol(static_cast<double>(j) * k);
  return jac;
}

double decay_weighted_norm(const CosineSeries& phi, double beta) {
  double sum = 0.0;
  for (int j = 1; j <= phi.modes(); ++j) sum += std::pow(static_cast<double>(j), beta) * std::abs(phi[j]);
  return sum;
}

}  // namespace fkdv
