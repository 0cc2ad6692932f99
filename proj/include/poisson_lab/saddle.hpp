#pragma once

#include <complex>
#include <vector>

#include "poisson_lab/log_complex.hpp"
#include "poisson_lab/sampler.hpp"
#include "poisson_lab/series.hpp"

namespace plab {

/// phi_k(z) = log f_M(z) - k log z in log-complex form.
LogComplex eval_phase(const PoissonSample& s, int k, std::complex<double> z, PrecisionConfig p);

/// phi_k^(r)(z) = (-1)^(r-1) (r-1)! [ -k / z^r + sum_x (z - x)^-r ], r >= 1.
std::complex<double> eval_phase_derivative(const PoissonSample& s, int k, std::complex<double> z,
                                           int r);

/// h_k(y) = sum_x (1/k) / (y - x/k) = h_M(k y).
std::complex<double> eval_h_scaled(const PoissonSample& s, int k, std::complex<double> y);

struct SaddlePoint {
  std::complex<double> sigma;
  int k = 0;
  double residual = 0.0;  // |phi_k'(sigma)|
  int iterations = 0;
  std::complex<double> second_derivative;  // phi_k''(sigma)
  double normalized_offset = 0.0;          // |sigma - i k / pi| / sqrt(k)
  std::vector<std::complex<double>> trace;
  std::vector<double> residual_trace;
};

/// 1e-10 * pi / k: phi_k' scales like 1/k near the saddle.
double default_saddle_tolerance(int k);

/// Damped Newton on phi_k' from i k / pi. Each step is halved (at most 40
/// times) until |phi_k'| decreases and the iterate stays in the upper half
/// plane. Success also requires |sigma - i k / pi| <= k / 2.
SaddlePoint find_saddle(const PoissonSample& s, int k, double tol, int max_iter = 100);

struct SaddleDiagnostics {
  double residual = 0.0;                    // (i)  |phi_k'(sigma)|
  std::complex<double> scaled_curvature;    // (ii) sigma^2 phi_k''(sigma) / k
  double third_derivative_ratio = 0.0;      // (iii) max |k^3 phi_k'''(z)| / k on the probe circle
  std::vector<std::complex<double>> probes;
};

/// Probes (iii) at 16 equally spaced points of |z - sigma| = k/2.
SaddleDiagnostics saddle_diagnostics(const PoissonSample& s, const SaddlePoint& sp);

}  // namespace plab
