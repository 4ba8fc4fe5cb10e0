#pragma once

// Uniform-grid synthesis and analysis for cosine/sine series on [0, pi].
// Backed by FFTW's real-to-real transforms; planning is serialized
// internally, execution is re-entrant.

#include <span>
#include <vector>

namespace fkdv::transforms {

/// Values of a0/2 + sum_{j>=1} a_j cos(j y) at y_i = i*pi/M, i = 0..M.
/// Coefficients beyond index M are rejected (they would alias).
std::vector<double> cosine_synthesis(std::span<const double> coeffs, int intervals);

/// Inverse of cosine_synthesis by the trapezoidal rule:
/// a_j = (2/pi) * integral_0^pi f(y) cos(j y) dy, j = 0..M, for M+1 samples
/// with the j = M entry halved.
std::vector<double> cosine_analysis(std::span<const double> samples);

/// Values of sum_{j>=1} b_j sin(j y) at y_i = i*pi/M, i = 0..M.
/// coeffs[0] is ignored so that indices line up with the cosine routines.
std::vector<double> sine_synthesis(std::span<const double> coeffs, int intervals);

}  // namespace fkdv::transforms
