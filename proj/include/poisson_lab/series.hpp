#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "poisson_lab/log_complex.hpp"
#include "poisson_lab/mp_real.hpp"
#include "poisson_lab/sampler.hpp"

namespace plab {

/// Mantissa bits for every high-precision real in a run. bits == 64 selects
/// the hardware extended-precision path where one exists.
struct PrecisionConfig {
  unsigned bits = 256;

  void validate() const;

  /// max(256, ceil(1.6 n log2 n)) for a run that needs Taylor coefficients
  /// up to degree n.
  static PrecisionConfig for_degree(int n);
};

/// log f_M(z) = sum_x log(1 - z/x), principal branch per factor. Returns the
/// zero element when z is a sample point.
LogComplex eval_log_f(const PoissonSample& s, std::complex<double> z, PrecisionConfig p);

/// h_M(z) = sum_x 1/(z - x), compensated summation. Throws PoleError at a
/// sample point.
std::complex<double> eval_h(const PoissonSample& s, std::complex<double> z);

/// Taylor coefficients e_0..e_{n_max} of f_M, i.e. elementary symmetric
/// functions of {-1/x}.
struct CoefficientTable {
  std::vector<MpReal> e;
  double window_halfwidth = 0.0;
  PrecisionConfig precision;
  std::size_t n_points = 0;
  std::uint64_t seed = 0;

  int n_max() const { return static_cast<int>(e.size()) - 1; }
};

/// Sequential multiplication by (1 - z/x), truncated at degree n_max.
CoefficientTable coefficients_product(const PoissonSample& s, int n_max, PrecisionConfig p);

/// Independent route: power sums of {-1/x} fed through Newton's identities,
/// run at whatever working precision a running error bound says is needed
/// for the result to be good to p.bits, then rounded to p.
CoefficientTable coefficients_newton(const PoissonSample& s, int n_max, PrecisionConfig p);

/// max_j log2(|a_j - b_j| / |b_j|) over the common index range.
double max_log2_relative_difference(const CoefficientTable& a, const CoefficientTable& b);

/// a_{k,r} = [z^r] f^(k), plus the cosine-law amplitude A_k and phase theta_k
/// read off the saddle. Without a saddle the table is in raw mode: A_k = 1,
/// theta_k = 0 and scaled == a.
struct DerivativeCoefficients {
  int k = 0;
  std::vector<MpReal> a;
  std::vector<MpReal> scaled;  // a[r] / A_k
  bool normalized = false;
  LogComplex amplitude = LogComplex::one();
  double theta = 0.0;
  std::complex<double> sigma{0.0, 0.0};
  bool complete = false;  // the series is the whole polynomial (no tail)

  int r_max() const { return static_cast<int>(a.size()) - 1; }
};

/// a[r] = e[k+r] (k+r)!/r!. With a saddle sigma_k,
/// A_k = k! sqrt(2/(pi k)) |sigma^-k f(sigma)| and
/// theta_k = arg(sigma^-k f(sigma)), both kept in log form.
DerivativeCoefficients derivative_coefficients(const CoefficientTable& c, const PoissonSample& s,
                                               int k, int r_max,
                                               std::optional<std::complex<double>> sigma);

struct ModulusReport {
  bool nondecreasing = true;
  std::vector<double> log_modulus;
  double worst_drop = 0.0;  // largest decrease of log|f| between grid neighbours
};

/// Walks b over the grid (|b| nondecreasing) and checks log|f(a + bi)| never
/// decreases.
ModulusReport check_increasing_modulus(const PoissonSample& s, double a,
                                       std::span<const double> b_grid);

/// max over the grid of |f(tau_lambda N, z) / [f(N, z - lambda) / f(N, -lambda)] - 1|,
/// both sides evaluated at precision p on the same finite point set.
double check_translation_covariance(const PoissonSample& s, double lambda,
                                    std::span<const std::complex<double>> z_grid,
                                    PrecisionConfig p);

/// For each m in halfwidths: median over j in [1, n_max] of the relative
/// change |e_j(2m) - e_j(m)| / |e_j(2m)| using nested windows of s.
std::vector<double> window_stabilization(const PoissonSample& s,
                                         std::span<const double> halfwidths, int n_max,
                                         PrecisionConfig p);

}  // namespace plab
