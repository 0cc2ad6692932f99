#include "poisson_lab/montecarlo.hpp"

#include <algorithm>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "parallel.hpp"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/saddle.hpp"
#include "poisson_lab/sampler.hpp"
#include "poisson_lab/stats.hpp"
#include "poisson_lab/zeros.hpp"
#include "summation.hpp"

namespace plab {

using nlohmann::json;
using std::numbers::pi;

namespace {

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

double frac(double x) { return x - std::floor(x); }

}  // namespace

// ---------------------------------------------------------------- config

void EnsembleConfig::validate() const {
  if (k < 1) throw InvalidParameter("k must be >= 1");
  if (!(window_halfwidth >= 0.0) || !std::isfinite(window_halfwidth))
    throw InvalidParameter("window half-width must be nonnegative (0 selects the default)");
  if (bits != 0) PrecisionConfig{bits}.validate();
  if (replicas < 1) throw InvalidParameter("replicas must be >= 1");
  if (threads < 1) throw InvalidParameter("threads must be >= 1");
  if (r_max < 0) throw InvalidParameter("r_max must be >= 0");
  if (zeros) {
    if (!(zero_window > 0.0)) throw InvalidParameter("zero window must be positive");
    if (!(cosine_window > 0.0 && cosine_window <= zero_window))
      throw InvalidParameter("cosine window must lie in (0, zero window]");
    if (!(grid_step > 0.0 && grid_step <= 0.1)) throw InvalidParameter("grid step must be in (0, 0.1]");
    if (!(refine_tol > 0.0)) throw InvalidParameter("refine tolerance must be positive");
    if (!(match_c > 0.0 && match_epsilon > 0.0 && match_epsilon < match_c * match_c))
      throw InvalidParameter("matching needs 0 < eps < c^2");
    if (resolved_r_max() < 1) throw InvalidParameter("zero finding needs r_max >= 1");
  }
  if (resolved_sign_lo() < 1 || resolved_sign_hi() < resolved_sign_lo())
    throw InvalidParameter("sign range must satisfy 1 <= lo <= hi");
  // The window must hold enough points for degree n_max with overwhelming
  // probability: mean count 2M against n_max.
  if (2.0 * resolved_window() < 1.5 * n_max() + 50.0)
    throw InvalidParameter("window too small for the requested degree");
}

double EnsembleConfig::resolved_window() const {
  return window_halfwidth > 0.0 ? window_halfwidth : std::max(10.0 * k, 500.0);
}

int EnsembleConfig::resolved_r_max() const {
  if (r_max > 0) return r_max;
  return zeros ? default_r_max(zero_window) : 6;
}

int EnsembleConfig::resolved_sign_lo() const { return sign_lo == 0 && sign_hi == 0 ? k : sign_lo; }
int EnsembleConfig::resolved_sign_hi() const {
  return sign_lo == 0 && sign_hi == 0 ? k + 2 : sign_hi;
}

int EnsembleConfig::n_max() const {
  return std::max(k + resolved_r_max(), resolved_sign_hi());
}

PrecisionConfig EnsembleConfig::precision() const {
  return bits ? PrecisionConfig{bits} : PrecisionConfig::for_degree(n_max());
}

json EnsembleConfig::to_json() const {
  return json{{"k", k},
              {"window_halfwidth", resolved_window()},
              {"bits", precision().bits},
              {"replicas", replicas},
              {"base_seed", base_seed},
              {"zeros", zeros},
              {"zero_window", zero_window},
              {"cosine_window", cosine_window},
              {"grid_step", grid_step},
              {"refine_tol", refine_tol},
              {"r_max", resolved_r_max()},
              {"match_epsilon", match_epsilon},
              {"match_c", match_c},
              {"sign_lo", resolved_sign_lo()},
              {"sign_hi", resolved_sign_hi()}};
}

// ---------------------------------------------------------------- replicas

int ReplicaSummary::sign_of(int j) const {
  const int i = j - sign_lo;
  if (i < 0 || i >= static_cast<int>(e_signs.size())) return 0;
  return e_signs[static_cast<std::size_t>(i)];
}

json ReplicaSummary::to_json() const {
  json j{{"seed", seed},
         {"k", k},
         {"ok", ok},
         {"saddle_converged", saddle_converged},
         {"sigma", complex_json(sigma)},
         {"saddle_residual", saddle_residual},
         {"saddle_iterations", saddle_iterations},
         {"normalized_offset", normalized_offset},
         {"scaled_curvature", complex_json(scaled_curvature)},
         {"theta_k", theta},
         {"log_A_k", log_amplitude},
         {"e1", e1},
         {"sign_lo", sign_lo},
         {"e_signs", e_signs},
         {"cosine_law_errors", cosine_law_errors},
         {"spacing",
          {{"n_zeros", spacing.n_zeros},
           {"mean_gap", spacing.mean_gap},
           {"median_gap", spacing.median_gap},
           {"max_abs_dev", spacing.max_abs_dev},
           {"nearest_fraction", spacing.nearest_fraction},
           {"interior", spacing.interior},
           {"matched", spacing.matched},
           {"max_match_distance", spacing.max_match_distance},
           {"empty", spacing.empty}}},
         {"cosine", {{"sup_f", cosine.sup_f}, {"sup_fprime", cosine.sup_fprime}}}};
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

ReplicaSummary run_replica(const EnsembleConfig& cfg, std::uint64_t seed) {
  ReplicaSummary out;
  out.seed = seed;
  out.k = cfg.k;
  out.sign_lo = cfg.resolved_sign_lo();

  const PoissonSample s = sample_poisson(cfg.resolved_window(), 1.0, seed);
  {
    NeumaierSum<double> e1;
    for (double x : s.points()) e1.add(-1.0 / x);
    out.e1 = e1.value();
  }

  SaddlePoint sp;
  try {
    sp = find_saddle(s, cfg.k, default_saddle_tolerance(cfg.k));
  } catch (const SaddleFailure& e) {
    out.failure = std::string("saddle: ") + e.what();
    return out;
  }
  out.saddle_converged = true;
  out.sigma = sp.sigma;
  out.saddle_residual = sp.residual;
  out.saddle_iterations = sp.iterations;
  out.normalized_offset = sp.normalized_offset;
  out.scaled_curvature = sp.sigma * sp.sigma * sp.second_derivative / static_cast<double>(cfg.k);

  const int n_max = cfg.n_max();
  if (static_cast<int>(s.size()) < n_max) {
    out.failure = "sample: fewer points than n_max";
    return out;
  }
  const CoefficientTable c = coefficients_product(s, n_max, cfg.precision());
  for (int j = out.sign_lo; j <= cfg.resolved_sign_hi(); ++j) out.e_signs.push_back(c.e[j].sign());

  const DerivativeCoefficients d =
      derivative_coefficients(c, s, cfg.k, cfg.resolved_r_max(), sp.sigma);
  out.theta = d.theta;
  out.log_amplitude = d.amplitude.log_mag;

  double fact = 1.0;
  for (int r = 0; r <= std::min(6, d.r_max()); ++r) {
    if (r > 0) fact *= r;
    const double law = d.scaled[r].to_double() * fact / std::pow(pi, r);
    out.cosine_law_errors.push_back(std::fabs(law - std::cos(d.theta - r * pi / 2.0)));
  }

  if (cfg.zeros) {
    try {
      const ZeroSet zs = find_real_zeros(d, cfg.zero_window, cfg.grid_step, cfg.refine_tol);
      const SpacingReport sr = spacing_stats(zs);
      out.spacing.n_zeros = zs.zeros.size();
      out.spacing.empty = sr.empty;
      out.spacing.mean_gap = sr.mean_gap;
      out.spacing.median_gap = sr.median_gap;
      out.spacing.max_abs_dev = sr.max_abs_dev_from_1;
      if (!zs.zeros.empty()) {
        const auto nearest = std::min_element(zs.zeros.begin(), zs.zeros.end(),
                                              [](double a, double b) { return std::fabs(a) < std::fabs(b); });
        out.spacing.nearest_fraction = frac(*nearest);
      }
      const MatchReport m = match_zero_sets(zs, d.theta, cfg.match_epsilon, cfg.match_c);
      out.spacing.matched = m.pairs.size();
      out.spacing.interior = m.pairs.size() + m.unmatched_found.size();
      out.spacing.max_match_distance = m.max_distance;

      const CosineComparison cc = cosine_compare(d, differentiate(d), cfg.cosine_window);
      out.cosine.sup_f = cc.sup_error_f;
      out.cosine.sup_fprime = cc.sup_error_fprime;
    } catch (const WindowTooLarge& e) {
      out.failure = std::string("zeros: ") + e.what();
      return out;
    }
  }
  out.ok = true;
  return out;
}

std::vector<ReplicaSummary> run_replicas(const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<ReplicaSummary> out(static_cast<std::size_t>(cfg.replicas));
  detail::parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
    out[i] = run_replica(cfg, cfg.base_seed + i);
  });
  std::sort(out.begin(), out.end(),
            [](const ReplicaSummary& a, const ReplicaSummary& b) { return a.seed < b.seed; });
  return out;
}

// ---------------------------------------------------------------- tests

json TestResult::to_json() const {
  return json{{"name", name},         {"statistic", statistic}, {"threshold", threshold},
              {"n_replicas", n_replicas}, {"pass", pass},         {"relation", relation},
              {"details", details}};
}

TestResult test_e1_cauchy(std::span<const double> e1, double alpha) {
  if (e1.size() < 1000) throw InvalidParameter("Cauchy test needs at least 1000 samples");
  std::vector<double> v(e1.begin(), e1.end());
  std::vector<double> absv(v.size());
  std::transform(v.begin(), v.end(), absv.begin(), [](double x) { return std::fabs(x); });
  const double scale = stats::median(absv);
  if (!(scale > 0.0)) throw InvalidParameter("degenerate sample for Cauchy test");
  const boost::math::cauchy_distribution<double> dist(0.0, scale);
  const double d = stats::ks_statistic(v, [&](double x) { return boost::math::cdf(dist, x); });
  const double p = stats::kolmogorov_pvalue(d, v.size());
  TestResult t;
  t.name = "e1_cauchy";
  t.statistic = p;
  t.threshold = alpha;
  t.relation = "p >";
  t.n_replicas = v.size();
  t.pass = p > alpha;
  t.details = {{"ks_d", d}, {"fitted_scale", scale}};
  return t;
}

TestResult test_sign_periodicity(std::span<const ReplicaSummary> summaries, int k,
                                 double threshold) {
  std::size_t n = 0, hits = 0;
  for (const auto& s : summaries) {
    const int a = s.sign_of(k), b = s.sign_of(k + 2);
    if (a == 0 || b == 0) continue;
    ++n;
    if (a == -b) ++hits;
  }
  if (n == 0) throw InvalidParameter("no replica covers e_k and e_{k+2}");
  TestResult t;
  t.name = "sign_periodicity";
  t.statistic = static_cast<double>(hits) / static_cast<double>(n);
  t.threshold = threshold;
  t.relation = ">=";
  t.n_replicas = n;
  t.pass = t.statistic >= threshold;
  t.details = {{"k", k}};
  return t;
}

TestResult test_translate_uniformity(std::span<const double> fractional_parts, double alpha) {
  if (fractional_parts.size() < 1000)
    throw InvalidParameter("uniformity test needs at least 1000 values");
  std::vector<double> v(fractional_parts.begin(), fractional_parts.end());
  for (double& x : v) x = frac(x);
  const double vstat = stats::kuiper_statistic(v);
  const double p = stats::kuiper_pvalue(vstat, v.size());
  TestResult t;
  t.name = "translate_uniformity";
  t.statistic = p;
  t.threshold = alpha;
  t.relation = "p >";
  t.n_replicas = v.size();
  t.pass = p > alpha;
  t.details = {{"kuiper_v", vstat}};
  return t;
}

std::vector<double> sample_e1(int replicas, double M, std::uint64_t base_seed, int threads) {
  if (replicas < 1) throw InvalidParameter("replicas must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(replicas));
  detail::parallel_for(out.size(), threads, [&](std::size_t i) {
    const PoissonSample s = sample_poisson(M, 1.0, base_seed + i);
    NeumaierSum<double> acc;
    for (double x : s.points()) acc.add(-1.0 / x);
    out[i] = acc.value();
  });
  return out;
}

double cauchy_scale_oracle(double M) {
  if (!(M > 0.0)) throw InvalidParameter("window must be positive");
  // Integrate period by period up to L = 2 pi N; the remainder is 1/L + O(L^-3).
  using boost::math::quadrature::gauss_kronrod;
  const auto g = [](double u) {
    if (u < 1e-4) return 0.5 - u * u / 24.0;
    const double s = std::sin(0.5 * u);
    return 2.0 * s * s / (u * u);
  };
  const double lo = 1.0 / M;
  const int periods = 4000;
  const double L = 2.0 * pi * periods;
  NeumaierSum<double> acc;
  double a = lo;
  // The first panel is split geometrically: the integrand is smooth but the
  // lower limit can be tiny.
  for (int j = 1; j <= periods; ++j) {
    const double b = 2.0 * pi * j;
    if (b <= a) continue;
    acc.add(gauss_kronrod<double, 31>::integrate(g, a, b, 10, 1e-13));
    a = b;
  }
  return 2.0 * (acc.value() + 1.0 / L);
}

double gamma_limit(int r) {
  if (r < 1) throw InvalidParameter("r must be >= 1");
  return std::sqrt(pi) * boost::math::tgamma_delta_ratio(r - 0.5, 0.5);
}

namespace {

std::complex<double> window_mean(std::complex<double> z, int r, double M) {
  if (r == 1) return std::log(z + M) - std::log(z - M);
  // Antiderivative of (z - x)^-r in x is (z - x)^(1 - r) / (r - 1).
  const double rr = static_cast<double>(r - 1);
  return (std::pow(z - M, -rr) - std::pow(z + M, -rr)) / rr;
}

double variance_quadrature(std::complex<double> z, int r, double M) {
  using boost::math::quadrature::gauss_kronrod;
  const double a = z.real(), y = std::fabs(z.imag());
  const auto g = [&](double x) { return std::pow((x - a) * (x - a) + y * y, -static_cast<double>(r)); };
  // Split at the peak and at a few widths around it.
  std::vector<double> cuts{-M};
  for (double c : {a - 50 * y, a - 5 * y, a, a + 5 * y, a + 50 * y})
    if (c > -M && c < M) cuts.push_back(c);
  cuts.push_back(M);
  NeumaierSum<double> acc;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc.add(gauss_kronrod<double, 61>::integrate(g, cuts[i], cuts[i + 1], 15, 1e-12));
  return acc.value();
}

}  // namespace

PoissonIntegralStats poisson_integral_stats(std::complex<double> z, int r, int replicas,
                                            double M, std::uint64_t base_seed, int threads) {
  if (z.imag() == 0.0) throw InvalidParameter("Im z must be nonzero");
  if (r < 1) throw InvalidParameter("r must be >= 1");
  if (replicas < 2) throw InvalidParameter("need at least 2 replicas");
  if (!(M > std::fabs(z.real()))) throw InvalidParameter("window must contain Re z");

  std::vector<std::complex<double>> w(static_cast<std::size_t>(replicas));
  detail::parallel_for(w.size(), threads, [&](std::size_t i) {
    const PoissonSample s = sample_poisson(M, 1.0, base_seed + i);
    NeumaierSum<std::complex<double>> acc;
    for (double x : s.points()) acc.add(std::pow(z - x, -r));
    w[i] = acc.value();
  });

  PoissonIntegralStats st;
  st.z = z;
  st.r = r;
  st.replicas = replicas;
  st.M = M;
  NeumaierSum<std::complex<double>> sum;
  for (auto v : w) sum.add(v);
  st.mean = sum.value() / static_cast<double>(replicas);
  NeumaierSum<double> ss;
  for (auto v : w) ss.add(std::norm(v - st.mean));
  st.variance = ss.value() / static_cast<double>(replicas - 1);
  st.mean_stderr = std::sqrt(st.variance / replicas);

  const double y = std::fabs(z.imag());
  st.limit_mean = r == 1 ? std::complex<double>(0.0, z.imag() > 0 ? -pi : pi) : 0.0;
  st.window_mean = window_mean(z, r, M);
  st.variance_oracle = variance_quadrature(z, r, M);
  st.variance_limit = gamma_limit(r) / std::pow(y, 2 * r - 1);
  st.gamma_hat = st.variance * std::pow(y, 2 * r - 1);

  st.mean_test.name = "poisson_mean";
  st.mean_test.statistic = std::abs(st.mean - st.limit_mean) / st.mean_stderr;
  st.mean_test.threshold = 3.0;
  st.mean_test.relation = "<=";
  st.mean_test.n_replicas = w.size();
  st.mean_test.pass = st.mean_test.statistic <= 3.0;
  st.mean_test.details = {{"mean", complex_json(st.mean)},
                          {"limit_mean", complex_json(st.limit_mean)},
                          {"window_mean", complex_json(st.window_mean)},
                          {"stderr", st.mean_stderr}};

  const double target = r == 1 ? st.variance_limit : st.variance_oracle;
  st.variance_test.name = "poisson_variance";
  st.variance_test.statistic = std::fabs(st.variance / target - 1.0);
  st.variance_test.threshold = 0.10;
  st.variance_test.relation = "<=";
  st.variance_test.n_replicas = w.size();
  st.variance_test.pass = st.variance_test.statistic <= 0.10;
  st.variance_test.details = {{"variance", st.variance},
                              {"target", target},
                              {"variance_oracle", st.variance_oracle},
                              {"variance_limit", st.variance_limit},
                              {"gamma_hat", st.gamma_hat}};
  return st;
}

GammaFit fit_gamma(int r, std::span<const double> heights, int replicas, double M,
                   std::uint64_t base_seed, int threads) {
  if (heights.size() < 2) throw InvalidParameter("gamma fit needs at least two heights");
  GammaFit g;
  g.r = r;
  g.heights.assign(heights.begin(), heights.end());
  for (std::size_t i = 0; i < heights.size(); ++i) {
    // Disjoint seed blocks per height keep the estimates independent.
    const auto st = poisson_integral_stats({0.0, heights[i]}, r, replicas, M,
                                           base_seed + i * static_cast<std::uint64_t>(replicas), threads);
    g.gamma_hat.push_back(st.gamma_hat);
  }
  const auto [lo, hi] = std::minmax_element(g.gamma_hat.begin(), g.gamma_hat.end());
  g.relative_spread = (*hi - *lo) / stats::mean(g.gamma_hat);
  return g;
}

}  // namespace plab
