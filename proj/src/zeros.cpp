#include "poisson_lab/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "poisson_lab/errors.hpp"

namespace plab {

namespace {

constexpr double kTailLimit = 1e-3;

// Evaluation cancels at most log2(sum |c_r x^r|) bits, a few dozen on the
// windows used here; the coefficients keep their own precision as addends.
constexpr mpfr_prec_t kHornerBits = 192;

double horner(const std::vector<MpReal>& coeffs, double x) {
  if (coeffs.empty()) return 0.0;
  const mpfr_prec_t bits = std::min(coeffs.front().bits(), kHornerBits);
  MpReal acc(bits);
  mpfr_set(acc.get(), coeffs.back().get(), MPFR_RNDN);
  MpReal xm(x, bits);
  for (std::size_t i = coeffs.size() - 1; i-- > 0;)
    mpfr_fma(acc.get(), acc.get(), xm.get(), coeffs[i].get(), MPFR_RNDN);
  return acc.to_double();
}

double max_term_log(const std::vector<MpReal>& c, double x, std::size_t lo, std::size_t hi) {
  double best = -std::numeric_limits<double>::infinity();
  const double lx = std::log(std::fabs(x));
  for (std::size_t r = lo; r < hi; ++r) best = std::max(best, c[r].log_abs() + r * lx);
  return best;
}

void check_tail(const DerivativeCoefficients& d, double x) {
  const double tail = tail_estimate(d, x);
  double limit = kTailLimit;
  if (!d.normalized) {
    // Raw tables have no natural unit; measure the tail against the largest term.
    limit *= std::exp(max_term_log(d.scaled, x == 0.0 ? 1.0 : x, 0, d.scaled.size()));
  }
  if (!(tail < limit))
    throw WindowTooLarge("Taylor tail at x = " + std::to_string(x) + " is not controlled");
}

std::vector<MpReal> rescaled(const DerivativeCoefficients& d, const LogComplex& amplitude) {
  std::vector<MpReal> c;
  if (d.a.empty()) return c;
  MpReal inv(d.a.front().bits());
  mpfr_set_d(inv.get(), -amplitude.log_mag, MPFR_RNDN);
  mpfr_exp(inv.get(), inv.get(), MPFR_RNDN);
  c.reserve(d.a.size());
  for (const auto& v : d.a) c.push_back(v * inv);
  return c;
}

}  // namespace

int default_r_max(double window_halfwidth) {
  return static_cast<int>(std::ceil(8.0 * window_halfwidth * std::numbers::pi / std::log(2.0)));
}

double tail_estimate(const DerivativeCoefficients& d, double x) {
  if (d.complete || x == 0.0) return 0.0;
  const std::size_t n = d.scaled.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  const std::size_t block = std::min<std::size_t>(4, n / 2);
  const double last = max_term_log(d.scaled, x, n - block, n);
  const double prev = max_term_log(d.scaled, x, n - 2 * block, n - block);
  if (std::isinf(last) && last < 0) return 0.0;
  const double log_q = (last - prev) / static_cast<double>(block);
  if (!(log_q < 0.0)) return std::numeric_limits<double>::infinity();
  const double q = std::exp(log_q);
  return std::exp(last) * q / (1.0 - q);
}

double eval_fk(const DerivativeCoefficients& d, double x) {
  check_tail(d, x);
  return horner(d.scaled, x);
}

double eval_series_scaled(const DerivativeCoefficients& d, double x, const LogComplex& amplitude) {
  return horner(rescaled(d, amplitude), x);
}

DerivativeCoefficients differentiate(const DerivativeCoefficients& d) {
  if (d.a.size() < 2) throw InvalidParameter("need r_max >= 1 to differentiate");
  DerivativeCoefficients out;
  out.k = d.k + 1;
  out.complete = d.complete;
  for (std::size_t r = 0; r + 1 < d.a.size(); ++r) {
    MpReal v(d.a[r + 1]);
    mpfr_mul_ui(v.get(), v.get(), static_cast<unsigned long>(r + 1), MPFR_RNDN);
    out.a.push_back(std::move(v));
  }
  out.scaled = out.a;
  return out;
}

ZeroSet find_real_zeros(const DerivativeCoefficients& d, double W, double grid_step,
                        double refine_tol) {
  if (!(W > 0.0)) throw InvalidParameter("window W must be > 0");
  if (!(grid_step > 0.0 && grid_step <= 0.1)) throw InvalidParameter("grid_step must be in (0, 0.1]");
  if (!(refine_tol > 0.0)) throw InvalidParameter("refine_tol must be > 0");
  check_tail(d, W);
  check_tail(d, -W);

  ZeroSet zs;
  zs.k = d.k;
  zs.window_halfwidth = W;
  zs.refine_tol = refine_tol;

  const int n = static_cast<int>(std::ceil(2.0 * W / grid_step));
  const double h = 2.0 * W / n;
  std::vector<double> xs(n + 1), vs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = -W + i * h;
    vs[i] = horner(d.scaled, xs[i]);
    if (vs[i] == 0.0) {
      // nudge inward so the bracket stays inside the window
      xs[i] += (i == n ? -h : h) / 7.0;
      vs[i] = horner(d.scaled, xs[i]);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::signbit(vs[i]) == std::signbit(vs[i + 1])) continue;
    double lo = xs[i], hi = xs[i + 1];
    const bool lo_negative = std::signbit(vs[i]);
    while (hi - lo > refine_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double vm = horner(d.scaled, mid);
      if (vm == 0.0) {
        lo = hi = mid;
        break;
      }
      if (std::signbit(vm) == lo_negative)
        lo = mid;
      else
        hi = mid;
    }
    zs.brackets.emplace_back(lo, hi);
    zs.zeros.push_back(0.5 * (lo + hi));
  }
  return zs;
}

std::vector<std::pair<double, double>> mutual_nearest_pairs(const std::vector<double>& a,
                                                            const std::vector<double>& b,
                                                            double radius) {
  auto nearest = [](const std::vector<double>& pool, double x) -> std::ptrdiff_t {
    if (pool.empty()) return -1;
    auto it = std::lower_bound(pool.begin(), pool.end(), x);
    std::ptrdiff_t best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == pool.begin() ? it : std::prev(it)}) {
      if (cand == pool.end()) continue;
      const double dist = std::fabs(*cand - x);
      if (dist < best_d) {
        best_d = dist;
        best = cand - pool.begin();
      }
    }
    return best;
  };
  std::vector<double> sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<std::pair<double, double>> out;
  for (double x : sa) {
    const auto j = nearest(sb, x);
    if (j < 0 || std::fabs(sb[j] - x) > radius) continue;
    const auto back = nearest(sa, sb[j]);
    if (back >= 0 && sa[back] == x) out.emplace_back(x, sb[j]);
  }
  return out;
}

MatchReport match_zero_sets(const ZeroSet& found, double theta, double epsilon, double c) {
  if (!(c > 0.0)) throw InvalidParameter("c must be > 0");
  if (!(epsilon > 0.0 && epsilon < c * c)) throw InvalidParameter("need 0 < epsilon < c^2");
  MatchReport rep;
  rep.radius = epsilon / c;
  const double W = found.window_halfwidth;
  const double inner_lo = -W + rep.radius, inner_hi = W - rep.radius;
  auto interior = [&](double x) { return x >= inner_lo && x <= inner_hi; };

  const double base = theta / std::numbers::pi + 0.5;
  for (double m = std::ceil(-W - base); base + m <= W; m += 1.0)
    if (base + m >= -W) rep.lattice.push_back(base + m);

  const auto pairs = mutual_nearest_pairs(found.zeros, rep.lattice, rep.radius);
  std::vector<double> paired_found, paired_lattice;
  for (auto [f, l] : pairs) {
    if (!interior(f) && !interior(l)) continue;
    rep.pairs.push_back({f, l, std::fabs(f - l)});
    rep.max_distance = std::max(rep.max_distance, std::fabs(f - l));
    paired_found.push_back(f);
    paired_lattice.push_back(l);
  }
  std::size_t interior_found = 0;
  for (double f : found.zeros) {
    if (!interior(f)) continue;
    ++interior_found;
    if (std::find(paired_found.begin(), paired_found.end(), f) == paired_found.end())
      rep.unmatched_found.push_back(f);
  }
  for (double l : rep.lattice)
    if (interior(l) && std::find(paired_lattice.begin(), paired_lattice.end(), l) == paired_lattice.end())
      rep.unmatched_lattice.push_back(l);
  rep.matched_fraction =
      interior_found == 0 ? 1.0
                          : 1.0 - static_cast<double>(rep.unmatched_found.size()) / interior_found;
  return rep;
}

CosineComparison cosine_compare(const DerivativeCoefficients& d,
                                const DerivativeCoefficients& d_next, double W, double grid_step) {
  if (d_next.k != d.k + 1) throw InvalidParameter("d_next must be the order k+1 table");
  if (!(grid_step > 0.0) || !(W > 0.0)) throw InvalidParameter("W and grid_step must be > 0");
  check_tail(d, W);
  check_tail(d, -W);
  CosineComparison cc;
  cc.grid_step = grid_step;
  const int n = static_cast<int>(std::ceil(2.0 * W / grid_step));
  const double h = 2.0 * W / n;
  constexpr double pi = std::numbers::pi;
  const std::vector<MpReal> next = rescaled(d_next, d.amplitude);
  for (int i = 0; i <= n; ++i) {
    const double x = -W + i * h;
    const double psi = std::cos(pi * x - d.theta);
    const double eta = -pi * std::sin(pi * x - d.theta);
    cc.sup_error_f = std::max(cc.sup_error_f, std::fabs(horner(d.scaled, x) - psi));
    cc.sup_error_fprime =
        std::max(cc.sup_error_fprime, std::fabs(horner(next, x) - eta));
  }
  return cc;
}

SpacingReport spacing_stats(const ZeroSet& zs) {
  SpacingReport rep;
  for (double z : zs.zeros) rep.fractional_parts.push_back(z - std::floor(z));
  if (zs.zeros.size() < 2) return rep;
  rep.empty = false;
  for (std::size_t i = 1; i < zs.zeros.size(); ++i) {
    const double g = zs.zeros[i] - zs.zeros[i - 1];
    rep.gaps.push_back(g);
    rep.mean_gap += g;
    rep.max_abs_dev_from_1 = std::max(rep.max_abs_dev_from_1, std::fabs(g - 1.0));
  }
  rep.mean_gap /= static_cast<double>(rep.gaps.size());
  std::vector<double> sorted = rep.gaps;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  rep.median_gap = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return rep;
}

}  // namespace plab
