#include "poisson_lab/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "poisson_lab/errors.hpp"
#include "summation.hpp"

namespace plab {

namespace {

void require_not_pole(const PoissonSample& s, int k, std::complex<double> z) {
  if (k > 0 && z == 0.0) throw PoleError("phase function has a branch point at 0");
  if (z.imag() == 0.0) {
    const auto pts = s.points();
    if (std::binary_search(pts.begin(), pts.end(), z.real()))
      throw PoleError("evaluation at a sample point");
  }
}

}  // namespace

LogComplex eval_phase(const PoissonSample& s, int k, std::complex<double> z, PrecisionConfig p) {
  if (k < 0) throw InvalidParameter("k must be >= 0");
  require_not_pole(s, k, z);
  LogComplex v = eval_log_f(s, z, p);
  if (k == 0) return v;
  return v / LogComplex::from_complex(z).pow(k);
}

std::complex<double> eval_phase_derivative(const PoissonSample& s, int k, std::complex<double> z,
                                           int r) {
  if (r < 1) throw InvalidParameter("derivative order r must be >= 1");
  if (k < 0) throw InvalidParameter("k must be >= 0");
  require_not_pole(s, k, z);
  NeumaierSum<std::complex<double>> acc;
  for (double x : s.points()) {
    const std::complex<double> w = 1.0 / (z - x);
    std::complex<double> wr = w;
    for (int i = 1; i < r; ++i) wr *= w;
    acc.add(wr);
  }
  std::complex<double> bracket = acc.value();
  if (k > 0) {
    const std::complex<double> iz = 1.0 / z;
    std::complex<double> izr = iz;
    for (int i = 1; i < r; ++i) izr *= iz;
    bracket -= static_cast<double>(k) * izr;
  }
  const double fact = std::tgamma(static_cast<double>(r));
  return (r % 2 == 1 ? 1.0 : -1.0) * fact * bracket;
}

std::complex<double> eval_h_scaled(const PoissonSample& s, int k, std::complex<double> y) {
  if (k < 1) throw InvalidParameter("k must be >= 1");
  return eval_h(s, static_cast<double>(k) * y);
}

double default_saddle_tolerance(int k) { return 1e-10 * std::numbers::pi / std::max(k, 1); }

SaddlePoint find_saddle(const PoissonSample& s, int k, double tol, int max_iter) {
  if (k < 1) throw InvalidParameter("saddle needs k >= 1");
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be > 0");
  if (max_iter < 1) throw InvalidParameter("max_iter must be >= 1");

  const std::complex<double> start{0.0, k / std::numbers::pi};
  SaddlePoint sp;
  sp.k = k;
  std::complex<double> z = start;
  std::complex<double> g = eval_phase_derivative(s, k, z, 1);
  sp.trace.push_back(z);
  sp.residual_trace.push_back(std::abs(g));

  int iter = 0;
  while (std::abs(g) > tol) {
    if (iter >= max_iter)
      throw SaddleFailure("no convergence after " + std::to_string(max_iter) + " iterations",
                          sp.trace);
    const std::complex<double> step = -g / eval_phase_derivative(s, k, z, 2);
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 40; ++halving, scale *= 0.5) {
      const std::complex<double> zn = z + scale * step;
      if (!(zn.imag() > 0.0)) continue;
      const std::complex<double> gn = eval_phase_derivative(s, k, zn, 1);
      if (std::abs(gn) < std::abs(g)) {
        z = zn;
        g = gn;
        accepted = true;
        break;
      }
    }
    ++iter;
    if (!accepted) throw SaddleFailure("damped Newton step made no progress", sp.trace);
    sp.trace.push_back(z);
    sp.residual_trace.push_back(std::abs(g));
  }

  if (std::abs(z - start) > 0.5 * k)
    throw SaddleFailure("iterate left the ball |z - ik/pi| <= k/2", sp.trace);

  sp.sigma = z;
  sp.residual = std::abs(g);
  sp.iterations = iter;
  sp.second_derivative = eval_phase_derivative(s, k, z, 2);
  sp.normalized_offset = std::abs(z - start) / std::sqrt(static_cast<double>(k));
  return sp;
}

SaddleDiagnostics saddle_diagnostics(const PoissonSample& s, const SaddlePoint& sp) {
  SaddleDiagnostics d;
  const double k = sp.k;
  d.residual = std::abs(eval_phase_derivative(s, sp.k, sp.sigma, 1));
  d.scaled_curvature = sp.sigma * sp.sigma * eval_phase_derivative(s, sp.k, sp.sigma, 2) / k;
  constexpr int probes = 16;
  for (int j = 0; j < probes; ++j) {
    const double t = 2.0 * std::numbers::pi * j / probes;
    const std::complex<double> z = sp.sigma + std::polar(0.5 * k, t);
    d.probes.push_back(z);
    const double v = std::abs(k * k * k * eval_phase_derivative(s, sp.k, z, 3)) / k;
    d.third_derivative_ratio = std::max(d.third_derivative_ratio, v);
  }
  return d;
}

}  // namespace plab
