#include "fkdv/transforms.hpp"

#include <fftw3.h>

#include <mutex>
#include <string>

#include "fkdv/error.hpp"

namespace fkdv::transforms {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place r2r transform of `data`; only the planner calls are serialized.
void execute_r2r(std::vector<double>& data, fftw_r2r_kind kind) {
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(data.size()), data.data(), data.data(), kind,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error(ErrorKind::InvalidArgument, "fftw planning failed");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void require_intervals(int intervals) {
  if (intervals < 1)
    throw Error(ErrorKind::InvalidArgument, "transform needs at least one interval");
}

}  // namespace

std::vector<double> cosine_synthesis(std::span<const double> coeffs, int intervals) {
  require_intervals(intervals);
  const auto m = static_cast<std::size_t>(intervals);
  if (coeffs.size() > m + 1)
    throw Error(ErrorKind::InvalidArgument,
                "cosine synthesis: " + std::to_string(coeffs.size() - 1) +
                    " modes do not fit on " + std::to_string(intervals) + " intervals");
  std::vector<double> data(m + 1, 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) data[j] = 0.5 * coeffs[j];
  if (coeffs.size() == m + 1) data[m] = coeffs[m];
  if (m == 1) {
    // REDFT00 needs two samples; handle the degenerate grid directly.
    return {data[0] + data[1], data[0] - data[1]};
  }
  execute_r2r(data, FFTW_REDFT00);
  return data;
}

std::vector<double> cosine_analysis(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::InvalidArgument, "cosine analysis needs two samples");
  std::vector<double> data(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size() - 1);
  execute_r2r(data, FFTW_REDFT00);
  for (double& v : data) v /= m;
  data.back() *= 0.5;  // Nyquist term: exact inverse of cosine_synthesis
  return data;
}

std::vector<double> sine_synthesis(std::span<const double> coeffs, int intervals) {
  require_intervals(intervals);
  const auto m = static_cast<std::size_t>(intervals);
  if (coeffs.size() > m + 1)
    throw Error(ErrorKind::InvalidArgument, "sine synthesis: too many modes for the grid");
  std::vector<double> out(m + 1, 0.0);
  if (m < 2) return out;
  std::vector<double> data(m - 1, 0.0);
  for (std::size_t j = 1; j < coeffs.size() && j < m; ++j) data[j - 1] = 0.5 * coeffs[j];
  execute_r2r(data, FFTW_RODFT00);
  for (std::size_t i = 1; i < m; ++i) out[i] = data[i - 1];
  return out;
}

}  // namespace fkdv::transforms
