#pragma once

#include <utility>
#include <vector>

#include "poisson_lab/series.hpp"

namespace plab {

/// ceil(8 W pi / ln 2): Taylor tail of cos(pi x) on [-W, W] far below 1e-6.
int default_r_max(double window_halfwidth);

/// Estimated |sum_{r > r_max} scaled[r] x^r| from the decay of the last
/// stored terms; 0 when the series is the whole polynomial.
double tail_estimate(const DerivativeCoefficients& d, double x);

/// f^(k)(x) / A_k by Horner in the table precision (raw f^(k)(x) when the
/// table is not normalized). Throws WindowTooLarge if the tail estimate at x
/// reaches 1e-3.
double eval_fk(const DerivativeCoefficients& d, double x);

/// Same series divided by an externally supplied amplitude, e.g. f^(k+1)/A_k.
double eval_series_scaled(const DerivativeCoefficients& d, double x, const LogComplex& amplitude);

/// Order k+1 raw coefficients from order k: a'_r = (r + 1) a_{r+1}.
DerivativeCoefficients differentiate(const DerivativeCoefficients& d);

struct ZeroSet {
  std::vector<double> zeros;
  std::vector<std::pair<double, double>> brackets;  // final sign-change brackets
  int k = 0;
  double window_halfwidth = 0.0;
  double refine_tol = 0.0;
};

/// Sign-change scan on a uniform grid, then bisection of each bracket down
/// to refine_tol. A grid node that is an exact zero is nudged by step / 7.
ZeroSet find_real_zeros(const DerivativeCoefficients& d, double W, double grid_step = 0.05,
                        double refine_tol = 1e-9);

struct ZeroPair {
  double found = 0.0;
  double lattice = 0.0;
  double distance = 0.0;
};

struct MatchReport {
  std::vector<ZeroPair> pairs;
  std::vector<double> unmatched_found;    // interior found zeros without a partner
  std::vector<double> unmatched_lattice;  // interior lattice points without a partner
  std::vector<double> lattice;
  double radius = 0.0;  // epsilon / c
  double max_distance = 0.0;
  double matched_fraction = 1.0;  // interior found zeros that were paired
};

/// Pairs a with b when each is the other's nearest neighbour within radius.
/// The relation is symmetric by construction.
std::vector<std::pair<double, double>> mutual_nearest_pairs(const std::vector<double>& a,
                                                            const std::vector<double>& b,
                                                            double radius);

/// Matches found zeros against theta/pi + 1/2 + Z inside the shrunken window
/// [-W + eps/c, W - eps/c]. Requires eps < c^2.
MatchReport match_zero_sets(const ZeroSet& found, double theta, double epsilon, double c = 0.5);

struct CosineComparison {
  double sup_error_f = 0.0;       // sup |f^(k)/A_k - cos(pi x - theta)|
  double sup_error_fprime = 0.0;  // sup |f^(k+1)/A_k + pi sin(pi x - theta)|
  double grid_step = 0.0;
};

CosineComparison cosine_compare(const DerivativeCoefficients& d,
                                const DerivativeCoefficients& d_next, double W,
                                double grid_step = 0.01);

struct SpacingReport {
  std::vector<double> gaps;
  double mean_gap = 0.0;
  double median_gap = 0.0;
  double max_abs_dev_from_1 = 0.0;
  std::vector<double> fractional_parts;
  bool empty = true;  // fewer than two zeros
};

SpacingReport spacing_stats(const ZeroSet& zs);

}  // namespace plab
