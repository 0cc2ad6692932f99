#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include "poisson_lab/log_complex.hpp"
#include "poisson_lab/saddle.hpp"
#include "poisson_lab/series.hpp"

namespace plab {

/// The six pieces of the circle |z| = |sigma_k|, all counterclockwise.
/// Gamma1 is the short arc around sigma_k, the primed arcs are conjugates,
/// Gamma2 / Gamma3 are what is left of the second / first quadrant.
enum class Arc { Gamma1, Gamma1Conj, Gamma2, Gamma3, Gamma2Conj, Gamma3Conj };

inline constexpr std::array<Arc, 6> kAllArcs = {Arc::Gamma1,     Arc::Gamma1Conj,
                                                Arc::Gamma2,     Arc::Gamma3,
                                                Arc::Gamma2Conj, Arc::Gamma3Conj};

std::string_view arc_label(Arc arc);

struct AngularInterval {
  double lo = 0.0;  // polar angle, radians
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct ContourSpec {
  int k = 0;
  std::complex<double> sigma;
  double radius = 0.0;      // R = |sigma|
  double beta = 0.0;        // arg sigma - pi/2
  double delta = 0.4;
  double half_angle = 0.0;  // k^-delta
  int nodes_per_arc = 512;
  bool exceptional = false;  // |beta| > k^-delta / 2
  std::array<std::vector<AngularInterval>, 6> pieces;

  const std::vector<AngularInterval>& arc(Arc a) const { return pieces[static_cast<int>(a)]; }
  double measure(Arc a) const;
};

/// Builds the arc decomposition through the located saddle. Gamma2/Gamma3
/// are split at the imaginary axis, so either may have two pieces when
/// Gamma1 sits entirely inside one quadrant.
ContourSpec build_contour(const SaddlePoint& sp, double delta = 0.4, int nodes_per_arc = 512);

struct QuadratureOptions {
  double rel_tol = 1e-10;  // node-doubling acceptance
  int max_doublings = 5;
};

struct ArcIntegral {
  Arc arc = Arc::Gamma1;
  /// Integral of f(z) z^(-k-r-1) dz divided by exp(Re phi_k(sigma)) R^-r.
  std::complex<double> normalized;
  LogComplex value;  // the same integral with the normalization reapplied
  int nodes = 0;
  bool converged = false;
  double last_change = 0.0;
};

/// Composite 8-point Gauss-Legendre along the arc in the polar angle; panel
/// count doubles until two successive estimates agree.
ArcIntegral integrate_arc(const PoissonSample& s, int k, int r, const ContourSpec& spec, Arc arc,
                          PrecisionConfig p = {64}, QuadratureOptions opt = {});

struct ContourResult {
  int k = 0;
  int r = 0;
  std::array<ArcIntegral, 6> per_arc;
  LogComplex total;  // (1 / 2 pi i) * sum of arcs = e_{k+r}
  std::complex<double> total_normalized;
  std::complex<double> dominant_ratio;
  std::array<double, 6> negligible_fractions{};  // |arc| / (k^-1/2 |f(sigma) sigma^(-k-r)|)
  bool converged = false;

  const ArcIntegral& arc(Arc a) const { return per_arc[static_cast<int>(a)]; }
  double negligible_fraction(Arc a) const { return negligible_fractions[static_cast<int>(a)]; }
  std::complex<double> total_value() const { return total.to_complex(); }
  /// Arc integral divided by 2 pi i, in the normalized units. Conjugate arcs
  /// give conjugate contributions (the raw integrals differ by a sign as
  /// well, since conjugation reverses orientation).
  std::complex<double> contribution(Arc a) const {
    return arc(a).normalized / std::complex<double>(0.0, 2.0 * 3.14159265358979323846);
  }
};

/// Cauchy integral for e_{k+r} over the six arcs, plus the Gamma1 ratio
/// against i sqrt(2 pi) k^-1/2 f(sigma) sigma^(-k-r).
ContourResult coefficient_via_contour(const PoissonSample& s, int k, int r,
                                      const ContourSpec& spec, PrecisionConfig p = {64},
                                      QuadratureOptions opt = {});

/// |total / e - 1| against a direct coefficient e.
double relative_error(const ContourResult& res, const MpReal& direct);

}  // namespace plab
