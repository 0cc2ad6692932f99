#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "poisson_lab/series.hpp"

namespace plab {

struct EnsembleConfig {
  int k = 60;
  double window_halfwidth = 0.0;  // 0: max(10 k, 500)
  unsigned bits = 0;  // 0: PrecisionConfig::for_degree(n_max())
  int replicas = 100;
  std::uint64_t base_seed = 1;
  int threads = 1;

  bool zeros = true;
  double zero_window = 5.0;
  double cosine_window = 3.0;  // sup-norm comparison window, within zero_window
  double grid_step = 0.05;
  double refine_tol = 1e-9;
  int r_max = 0;  // 0: default_r_max(zero_window)
  double match_epsilon = 0.05;
  double match_c = 0.5;
  int sign_lo = 0;  // e_signs cover [sign_lo, sign_hi]; both 0 means [k, k + 2]
  int sign_hi = 0;

  void validate() const;
  double resolved_window() const;
  int resolved_r_max() const;
  int resolved_sign_lo() const;
  int resolved_sign_hi() const;
  int n_max() const;
  PrecisionConfig precision() const;
  nlohmann::json to_json() const;
};

struct SpacingDigest {
  std::size_t n_zeros = 0;
  double mean_gap = 0.0;
  double median_gap = 0.0;
  double max_abs_dev = 0.0;
  double nearest_fraction = 0.0;  // fractional part of the zero nearest 0
  std::size_t interior = 0;
  std::size_t matched = 0;
  double max_match_distance = 0.0;
  bool empty = true;
};

struct CosineDigest {
  double sup_f = 0.0;
  double sup_fprime = 0.0;
};

struct ReplicaSummary {
  std::uint64_t seed = 0;
  int k = 0;
  bool ok = false;
  bool saddle_converged = false;
  std::string failure;

  std::complex<double> sigma;
  double saddle_residual = 0.0;
  int saddle_iterations = 0;
  double normalized_offset = 0.0;
  std::complex<double> scaled_curvature;

  double theta = 0.0;
  double log_amplitude = 0.0;  // natural log of A_k
  double e1 = 0.0;
  int sign_lo = 0;
  std::vector<int> e_signs;
  std::vector<double> cosine_law_errors;  // r = 0..min(6, r_max)

  SpacingDigest spacing;
  CosineDigest cosine;

  /// Sign of e_j, 0 when j is outside the recorded range.
  int sign_of(int j) const;
  nlohmann::json to_json() const;
};

ReplicaSummary run_replica(const EnsembleConfig& cfg, std::uint64_t seed);

/// Replica r uses seed base_seed + r. Output is sorted by seed whatever the
/// scheduling; saddle failures are recorded in the summary.
std::vector<ReplicaSummary> run_replicas(const EnsembleConfig& cfg);

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t n_replicas = 0;
  bool pass = false;
  std::string relation;  // how statistic is compared with threshold
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// KS against Cauchy(0, s) with s = median |e1|; statistic is the p-value.
TestResult test_e1_cauchy(std::span<const double> e1, double alpha = 0.01);

/// Frequency of sign(e_k) = -sign(e_{k+2}) over successful replicas.
TestResult test_sign_periodicity(std::span<const ReplicaSummary> summaries, int k,
                                 double threshold = 0.9);

/// Kuiper test of fractional parts against Uniform on the circle.
TestResult test_translate_uniformity(std::span<const double> fractional_parts,
                                     double alpha = 0.01);

/// e1 = sum -1/x for independent samples on [-M, M], seeds base + i.
std::vector<double> sample_e1(int replicas, double M, std::uint64_t base_seed, int threads = 1);

/// Scale s of the Cauchy limit of e1 on [-M, M] read off the characteristic
/// function at t = 1: s = 2 int_{1/M}^inf (1 - cos u) / u^2 du.
double cauchy_scale_oracle(double M);

struct PoissonIntegralStats {
  std::complex<double> z;
  int r = 1;
  int replicas = 0;
  double M = 0.0;
  std::complex<double> mean;
  double mean_stderr = 0.0;
  double variance = 0.0;  // E |W - EW|^2
  std::complex<double> limit_mean;   // -i pi sgn(Im z) when r = 1, else 0
  std::complex<double> window_mean;  // int_{-M}^{M} (z - x)^-r dx
  double variance_oracle = 0.0;      // int_{-M}^{M} |z - x|^-2r dx by quadrature
  double variance_limit = 0.0;       // gamma_r / |Im z|^(2r - 1)
  double gamma_hat = 0.0;            // variance |Im z|^(2r - 1)
  TestResult mean_test;
  TestResult variance_test;
};

/// W_r(z) = sum (z - x)^-r over replicas. The variance is checked against
/// pi / |Im z| for r = 1 and against the window quadrature otherwise.
PoissonIntegralStats poisson_integral_stats(std::complex<double> z, int r, int replicas,
                                            double M, std::uint64_t base_seed, int threads = 1);

/// int_R (1 + x^2)^-r dx.
double gamma_limit(int r);

struct GammaFit {
  int r = 0;
  std::vector<double> heights;
  std::vector<double> gamma_hat;
  double relative_spread = 0.0;  // (max - min) / mean
};

GammaFit fit_gamma(int r, std::span<const double> heights, int replicas, double M,
                   std::uint64_t base_seed, int threads = 1);

}  // namespace plab
