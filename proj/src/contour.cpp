#include "poisson_lab/contour.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "poisson_lab/errors.hpp"

namespace plab {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussRule {
  std::array<double, 8> x{};
  std::array<double, 8> w{};
};

const GaussRule& gauss8() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 8>;
    GaussRule g;
    const auto& abscissa = G::abscissa();
    const auto& weights = G::weights();
    for (std::size_t i = 0; i < 4; ++i) {
      g.x[i] = -abscissa[i];
      g.w[i] = weights[i];
      g.x[7 - i] = abscissa[i];
      g.w[7 - i] = weights[i];
    }
    return g;
  }();
  return rule;
}

std::complex<double> integrate_pieces(const PoissonSample& s, int k, int r, const ContourSpec& spec,
                                      const std::vector<AngularInterval>& pieces, int panels,
                                      double ref_log_mag, PrecisionConfig p) {
  double total_len = 0.0;
  for (const auto& iv : pieces) total_len += iv.length();
  std::complex<double> sum{0.0, 0.0};
  if (total_len <= 0.0) return sum;
  const GaussRule& g = gauss8();
  for (const auto& iv : pieces) {
    if (iv.length() <= 0.0) continue;
    const int n = std::max(1, static_cast<int>(std::lround(panels * iv.length() / total_len)));
    const double h = iv.length() / n;
    for (int j = 0; j < n; ++j) {
      const double mid = iv.lo + (j + 0.5) * h;
      for (int q = 0; q < 8; ++q) {
        const double t = mid + 0.5 * h * g.x[q];
        const std::complex<double> z = std::polar(spec.radius, t);
        const LogComplex ph = eval_phase(s, k, z, p);
        if (ph.is_zero()) continue;
        // dz = i z dt, so f z^(-k-r-1) dz = i exp(phi_k(z)) z^-r dt
        const std::complex<double> v =
            std::polar(std::exp(ph.log_mag - ref_log_mag), ph.arg - r * t);
        sum += (0.5 * h * g.w[q]) * std::complex<double>(0.0, 1.0) * v;
      }
    }
  }
  return sum;
}

}  // namespace

std::string_view arc_label(Arc arc) {
  switch (arc) {
    case Arc::Gamma1: return "G1";
    case Arc::Gamma1Conj: return "G1'";
    case Arc::Gamma2: return "G2";
    case Arc::Gamma3: return "G3";
    case Arc::Gamma2Conj: return "G2'";
    case Arc::Gamma3Conj: return "G3'";
  }
  return "?";
}

double ContourSpec::measure(Arc a) const {
  double m = 0.0;
  for (const auto& iv : arc(a)) m += iv.length();
  return m;
}

ContourSpec build_contour(const SaddlePoint& sp, double delta, int nodes_per_arc) {
  if (!(delta > 1.0 / 3.0 && delta < 0.5))
    throw InvalidParameter("delta must lie strictly inside (1/3, 1/2)");
  if (nodes_per_arc < 16) throw InvalidParameter("nodes_per_arc must be >= 16");
  if (sp.k < 1 || !(sp.sigma.imag() > 0.0)) throw InvalidParameter("saddle must be in the upper half plane");

  ContourSpec c;
  c.k = sp.k;
  c.sigma = sp.sigma;
  c.radius = std::abs(sp.sigma);
  const double alpha = std::arg(sp.sigma);
  c.beta = alpha - kPi / 2;
  c.delta = delta;
  c.nodes_per_arc = nodes_per_arc;
  c.half_angle = std::pow(static_cast<double>(sp.k), -delta);
  c.exceptional = std::fabs(c.beta) > 0.5 * c.half_angle;

  const double w = c.half_angle;
  const double g1_lo = std::max(alpha - w, 0.0);
  const double g1_hi = std::min(alpha + w, kPi);

  auto& g1 = c.pieces[static_cast<int>(Arc::Gamma1)];
  auto& g2 = c.pieces[static_cast<int>(Arc::Gamma2)];
  auto& g3 = c.pieces[static_cast<int>(Arc::Gamma3)];
  g1.push_back({g1_lo, g1_hi});
  // first quadrant [0, pi/2] and second quadrant [pi/2, pi] minus Gamma1
  auto subtract = [&](double lo, double hi, std::vector<AngularInterval>& out) {
    if (g1_lo > lo) out.push_back({lo, std::min(hi, g1_lo)});
    if (g1_hi < hi) out.push_back({std::max(lo, g1_hi), hi});
    std::erase_if(out, [](const AngularInterval& iv) { return iv.length() <= 0.0; });
  };
  subtract(0.0, kPi / 2, g3);
  subtract(kPi / 2, kPi, g2);

  auto mirror = [](const std::vector<AngularInterval>& in) {
    std::vector<AngularInterval> out;
    for (auto it = in.rbegin(); it != in.rend(); ++it) out.push_back({-it->hi, -it->lo});
    return out;
  };
  c.pieces[static_cast<int>(Arc::Gamma1Conj)] = mirror(g1);
  c.pieces[static_cast<int>(Arc::Gamma2Conj)] = mirror(g2);
  c.pieces[static_cast<int>(Arc::Gamma3Conj)] = mirror(g3);
  return c;
}

ArcIntegral integrate_arc(const PoissonSample& s, int k, int r, const ContourSpec& spec, Arc arc,
                          PrecisionConfig p, QuadratureOptions opt) {
  if (r < 0) throw InvalidParameter("r must be >= 0");
  if (k != spec.k) throw InvalidParameter("contour was built for a different k");
  const LogComplex at_saddle = eval_phase(s, k, spec.sigma, p);
  const double ref = at_saddle.log_mag;
  // Dominant-arc scale in normalized units; guards the stopping rule on
  // arcs whose own contribution is negligible.
  const double floor_scale = std::sqrt(2.0 * kPi / k);

  ArcIntegral out;
  out.arc = arc;
  int panels = std::max(1, spec.nodes_per_arc / 8);
  std::complex<double> coarse = integrate_pieces(s, k, r, spec, spec.arc(arc), panels, ref, p);
  std::complex<double> fine = coarse;
  for (int d = 0; d <= opt.max_doublings; ++d) {
    panels *= 2;
    fine = integrate_pieces(s, k, r, spec, spec.arc(arc), panels, ref, p);
    out.last_change = std::abs(fine - coarse);
    if (out.last_change <= opt.rel_tol * std::max(std::abs(fine), floor_scale)) {
      out.converged = true;
      break;
    }
    coarse = fine;
  }
  out.nodes = panels * 8;
  out.normalized = fine;
  out.value = LogComplex::from_complex(fine) *
              LogComplex::from_log(ref - r * std::log(spec.radius), 0.0);
  return out;
}

ContourResult coefficient_via_contour(const PoissonSample& s, int k, int r,
                                      const ContourSpec& spec, PrecisionConfig p,
                                      QuadratureOptions opt) {
  if (static_cast<std::size_t>(k + r) > s.size())
    throw InvalidParameter("k + r exceeds the number of sample points");
  ContourResult res;
  res.k = k;
  res.r = r;
  std::complex<double> sum{0.0, 0.0};
  res.converged = true;
  for (Arc a : kAllArcs) {
    auto ai = integrate_arc(s, k, r, spec, a, p, opt);
    sum += ai.normalized;
    res.converged = res.converged && ai.converged;
    res.per_arc[static_cast<int>(a)] = ai;
  }
  const LogComplex at_saddle = eval_phase(s, k, spec.sigma, p);
  const double scale_log = at_saddle.log_mag - r * std::log(spec.radius);
  res.total_normalized = sum / std::complex<double>(0.0, 2.0 * kPi);
  res.total = LogComplex::from_complex(res.total_normalized) * LogComplex::from_log(scale_log, 0.0);

  const double alpha = std::arg(spec.sigma);
  const std::complex<double> predicted =
      std::complex<double>(0.0, std::sqrt(2.0 * kPi / k)) * std::polar(1.0, at_saddle.arg - r * alpha);
  res.dominant_ratio = res.arc(Arc::Gamma1).normalized / predicted;
  for (Arc a : kAllArcs)
    res.negligible_fractions[static_cast<int>(a)] =
        std::abs(res.arc(a).normalized) * std::sqrt(static_cast<double>(k));
  return res;
}

double relative_error(const ContourResult& res, const MpReal& direct) {
  const LogComplex d = LogComplex::from_real(direct);
  if (d.is_zero()) return std::numeric_limits<double>::infinity();
  // Compare in units of |e| so superexponentially small coefficients stay in range.
  return std::abs((res.total / d).to_complex() - 1.0);
}

}  // namespace plab
