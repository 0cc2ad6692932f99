#include "poisson_lab/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>

#include "poisson_lab/errors.hpp"
#include "summation.hpp"

namespace plab {

namespace {

bool is_sample_point(const PoissonSample& s, std::complex<double> z) {
  if (z.imag() != 0.0) return false;
  const auto pts = s.points();
  return std::binary_search(pts.begin(), pts.end(), z.real());
}

/// sum_x log(1 - z/(x + shift)) with every operation in MPFR at `bits`.
struct MpLogProduct {
  MpReal log_mag;
  MpReal arg;  // unwrapped sum of per-factor principal arguments
  bool zero = false;
};

MpLogProduct mp_log_product(std::span<const double> pts, double shift, const MpReal& zr,
                            const MpReal& zi, mpfr_prec_t bits) {
  MpLogProduct out{MpReal(bits), MpReal(bits)};
  MpReal xs(bits), re(bits), im(bits), t(bits);
  for (double x : pts) {
    mpfr_set_d(xs.get(), x, MPFR_RNDN);
    mpfr_add_d(xs.get(), xs.get(), shift, MPFR_RNDN);
    if (xs.is_zero()) throw InvalidSample("sample point at the origin");
    mpfr_div(re.get(), zr.get(), xs.get(), MPFR_RNDN);
    mpfr_ui_sub(re.get(), 1, re.get(), MPFR_RNDN);
    mpfr_div(im.get(), zi.get(), xs.get(), MPFR_RNDN);
    mpfr_neg(im.get(), im.get(), MPFR_RNDN);
    if (re.is_zero() && im.is_zero()) {
      out.zero = true;
      continue;
    }
    mpfr_hypot(t.get(), re.get(), im.get(), MPFR_RNDN);
    mpfr_log(t.get(), t.get(), MPFR_RNDN);
    mpfr_add(out.log_mag.get(), out.log_mag.get(), t.get(), MPFR_RNDN);
    mpfr_atan2(t.get(), im.get(), re.get(), MPFR_RNDN);
    mpfr_add(out.arg.get(), out.arg.get(), t.get(), MPFR_RNDN);
  }
  return out;
}

LogComplex to_log_complex(const MpLogProduct& m, mpfr_prec_t bits) {
  if (m.zero) return LogComplex::zero();
  // Reduce the argument modulo 2 pi before dropping to double.
  MpReal two_pi(bits), q(bits), r(bits);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_ui(two_pi.get(), two_pi.get(), 2, MPFR_RNDN);
  mpfr_div(q.get(), m.arg.get(), two_pi.get(), MPFR_RNDN);
  mpfr_rint(q.get(), q.get(), MPFR_RNDN);
  mpfr_mul(q.get(), q.get(), two_pi.get(), MPFR_RNDN);
  mpfr_sub(r.get(), m.arg.get(), q.get(), MPFR_RNDN);
  return LogComplex::from_log(m.log_mag.to_double(), r.to_double());
}

LogComplex log_f_extended(const PoissonSample& s, std::complex<double> z) {
  using ld = long double;
  NeumaierSum<ld> mag, arg;
  const ld a = z.real(), b = z.imag();
  for (double xd : s.points()) {
    const ld x = xd;
    if (x == 0.0L) throw InvalidSample("sample point at the origin");
    const ld re = 1.0L - a / x;
    const ld im = -b / x;
    mag.add(0.5L * std::log(re * re + im * im));
    arg.add(std::atan2(im, re));
  }
  return LogComplex::from_log(static_cast<double>(mag.value()),
                              static_cast<double>(std::remainder(arg.value(), 2.0L * std::numbers::pi_v<ld>)));
}

CoefficientTable empty_table(const PoissonSample& s, int n_max, PrecisionConfig p) {
  p.validate();
  if (n_max < 0) throw InvalidParameter("n_max must be >= 0");
  if (static_cast<std::size_t>(n_max) > s.size())
    throw InvalidParameter("n_max exceeds the number of sample points");
  for (double x : s.points())
    if (x == 0.0) throw InvalidSample("sample point at the origin");
  CoefficientTable c;
  c.window_halfwidth = s.window_halfwidth();
  c.precision = p;
  c.n_points = s.size();
  c.seed = s.seed();
  c.e.reserve(static_cast<std::size_t>(n_max) + 1);
  c.e.emplace_back(1.0, p.bits);
  for (int j = 1; j <= n_max; ++j) c.e.emplace_back(p.bits);
  return c;
}

}  // namespace

void PrecisionConfig::validate() const {
  if (bits < 64) throw InvalidParameter("precision must be at least 64 bits");
}

PrecisionConfig PrecisionConfig::for_degree(int n) {
  const double nn = std::max(n, 2);
  const double rule = std::ceil(1.6 * nn * std::log2(nn));
  return {static_cast<unsigned>(std::max(256.0, rule))};
}

LogComplex eval_log_f(const PoissonSample& s, std::complex<double> z, PrecisionConfig p) {
  p.validate();
  if (is_sample_point(s, z)) return LogComplex::zero();
  if (z == 0.0) return LogComplex::one();
  if (p.bits == 64) return log_f_extended(s, z);
  MpReal zr(z.real(), p.bits), zi(z.imag(), p.bits);
  return to_log_complex(mp_log_product(s.points(), 0.0, zr, zi, p.bits), p.bits);
}

std::complex<double> eval_h(const PoissonSample& s, std::complex<double> z) {
  if (is_sample_point(s, z)) throw PoleError("h evaluated at a sample point");
  NeumaierSum<std::complex<double>> acc;
  for (double x : s.points()) acc.add(1.0 / (z - x));
  return acc.value();
}

CoefficientTable coefficients_product(const PoissonSample& s, int n_max, PrecisionConfig p) {
  CoefficientTable c = empty_table(s, n_max, p);
  // Multiplying by (1 - z/x) only divides by a double, which costs linear
  // rather than quadratic time in the precision.
  MpReal t(p.bits);
  int filled = 0;
  for (double x : s.points()) {
    filled = std::min(filled + 1, n_max);
    for (int j = filled; j >= 1; --j) {
      mpfr_div_d(t.get(), c.e[j - 1].get(), x, MPFR_RNDN);
      mpfr_sub(c.e[j].get(), c.e[j].get(), t.get(), MPFR_RNDN);
    }
  }
  return c;
}

namespace {

struct NewtonPass {
  std::vector<MpReal> e;
  double log2_error = 0.0;  // running bound on max_m log2 |relative error of e_m|
};

/// Newton's identities at working precision w, with a first-order running
/// error bound carried alongside in log2 form.
NewtonPass newton_pass(std::span<const double> pts, int n_max, mpfr_prec_t w) {
  const double ln2 = std::log(2.0);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<MpReal> p_sum, abs_sum;
  for (int r = 0; r <= n_max; ++r) {
    p_sum.emplace_back(w);
    abs_sum.emplace_back(w);
  }
  MpReal y(w), pw(w), apw(w);
  for (double x : pts) {
    mpfr_set_si(y.get(), -1, MPFR_RNDN);
    mpfr_div_d(y.get(), y.get(), x, MPFR_RNDN);
    mpfr_set(pw.get(), y.get(), MPFR_RNDN);
    for (int r = 1; r <= n_max; ++r) {
      mpfr_add(p_sum[r].get(), p_sum[r].get(), pw.get(), MPFR_RNDN);
      mpfr_abs(apw.get(), pw.get(), MPFR_RNDN);
      mpfr_add(abs_sum[r].get(), abs_sum[r].get(), apw.get(), MPFR_RNDN);
      mpfr_mul(pw.get(), pw.get(), y.get(), MPFR_RNDN);
    }
  }
  // log2 of |p_i| and of its relative error (cancellation in the power sum).
  std::vector<double> lp(n_max + 1, ninf), lp_err(n_max + 1, ninf);
  const double lu = -static_cast<double>(w) + 2.0;
  for (int i = 1; i <= n_max; ++i) {
    lp[i] = p_sum[i].log_abs() / ln2;
    lp_err[i] = lu + std::log2(static_cast<double>(pts.size())) + abs_sum[i].log_abs() / ln2 - lp[i];
  }

  NewtonPass out;
  out.e.emplace_back(1.0, w);
  std::vector<double> le{0.0}, le_err{ninf};
  MpReal acc(w), term(w);
  for (int m = 1; m <= n_max; ++m) {
    mpfr_set_zero(acc.get(), 1);
    double worst_term = ninf, worst_err = ninf;
    for (int i = 1; i <= m; ++i) {
      mpfr_mul(term.get(), out.e[m - i].get(), p_sum[i].get(), MPFR_RNDN);
      if (i % 2 == 1)
        mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
      else
        mpfr_sub(acc.get(), acc.get(), term.get(), MPFR_RNDN);
      const double lt = le[m - i] + lp[i];
      worst_term = std::max(worst_term, lt);
      worst_err = std::max(worst_err, lt + std::max(le_err[m - i], lp_err[i]));
    }
    MpReal em(w);
    mpfr_div_ui(em.get(), acc.get(), static_cast<unsigned long>(m), MPFR_RNDN);
    const double lem = em.log_abs() / ln2 + std::log2(static_cast<double>(m));
    le.push_back(em.log_abs() / ln2);
    // Rounding of the m terms plus inherited error, relative to m |e_m|.
    const double rounding = lu + std::log2(static_cast<double>(m)) + worst_term;
    const double inherited = worst_err + std::log2(static_cast<double>(m));
    le_err.push_back(em.is_zero() ? INFINITY : std::max(rounding, inherited) - lem);
    out.e.push_back(std::move(em));
  }
  out.log2_error = *std::max_element(le_err.begin(), le_err.end());
  return out;
}

}  // namespace

CoefficientTable coefficients_newton(const PoissonSample& s, int n_max, PrecisionConfig p) {
  CoefficientTable c = empty_table(s, n_max, p);
  const auto pts = s.points();
  // Newton's identities cancel roughly log2(max|1/x|^n / |e_n|) bits, so the
  // recurrence runs at a raised precision until its running error bound
  // clears the requested one, then rounds.
  double max_y = 1.0;
  for (double x : pts) max_y = std::max(max_y, 1.0 / std::fabs(x));
  const double n = std::max(n_max, 2);
  double guard = n * std::log2(max_y) + n * std::max(0.0, std::log2(n / (std::numbers::pi * std::numbers::e))) + 64.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const auto w = static_cast<mpfr_prec_t>(p.bits + std::ceil(guard));
    NewtonPass pass = newton_pass(pts, n_max, w);
    const double target = -static_cast<double>(p.bits) - 8.0;
    if (pass.log2_error <= target || attempt == 5) {
      for (int j = 1; j <= n_max; ++j) mpfr_set(c.e[j].get(), pass.e[j].get(), MPFR_RNDN);
      return c;
    }
    guard += std::min(pass.log2_error - target + 32.0, 1e6);
  }
  return c;
}

double max_log2_relative_difference(const CoefficientTable& a, const CoefficientTable& b) {
  const int n = std::min(a.n_max(), b.n_max());
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= n; ++j) worst = std::max(worst, log2_relative_difference(a.e[j], b.e[j]));
  return worst;
}

DerivativeCoefficients derivative_coefficients(const CoefficientTable& c, const PoissonSample& s,
                                               int k, int r_max,
                                               std::optional<std::complex<double>> sigma) {
  if (k < 0 || r_max < 0) throw InvalidParameter("k and r_max must be >= 0");
  if (k + r_max > c.n_max())
    throw InvalidParameter("k + r_max = " + std::to_string(k + r_max) +
                           " exceeds table degree " + std::to_string(c.n_max()));
  const mpfr_prec_t bits = c.precision.bits;
  DerivativeCoefficients d;
  d.k = k;
  d.complete = c.n_max() == static_cast<int>(c.n_points) && k + r_max == c.n_max();
  d.a.reserve(static_cast<std::size_t>(r_max) + 1);
  MpReal num(bits), den(bits);
  for (int r = 0; r <= r_max; ++r) {
    mpfr_fac_ui(num.get(), static_cast<unsigned long>(k + r), MPFR_RNDN);
    mpfr_fac_ui(den.get(), static_cast<unsigned long>(r), MPFR_RNDN);
    MpReal ar = c.e[k + r] * (num / den);
    d.a.push_back(std::move(ar));
  }

  if (!sigma || k == 0) {
    d.scaled = d.a;
    return d;
  }

  // phi_k(sigma) = log f(sigma) - k log sigma; the result only needs double
  // accuracy, so 128 working bits suffice regardless of the table precision.
  const LogComplex log_f = eval_log_f(s, *sigma, PrecisionConfig{128});
  if (log_f.is_zero()) throw PoleError("saddle coincides with a zero of f");
  const double log_k_fact = std::lgamma(static_cast<double>(k) + 1.0);
  const double log_abs_phase = log_f.log_mag - k * std::log(std::abs(*sigma));
  d.normalized = true;
  d.sigma = *sigma;
  d.amplitude = LogComplex::from_log(
      log_k_fact + 0.5 * std::log(2.0 / (std::numbers::pi * k)) + log_abs_phase, 0.0);
  d.theta = wrap_angle(log_f.arg - k * std::arg(*sigma));

  MpReal inv_amp(bits);
  mpfr_set_d(inv_amp.get(), -d.amplitude.log_mag, MPFR_RNDN);
  mpfr_exp(inv_amp.get(), inv_amp.get(), MPFR_RNDN);
  d.scaled.reserve(d.a.size());
  for (const auto& ar : d.a) d.scaled.push_back(ar * inv_amp);
  return d;
}

ModulusReport check_increasing_modulus(const PoissonSample& s, double a,
                                       std::span<const double> b_grid) {
  for (std::size_t i = 1; i < b_grid.size(); ++i)
    if (std::fabs(b_grid[i]) < std::fabs(b_grid[i - 1]))
      throw InvalidParameter("|b| grid must be nondecreasing");
  ModulusReport rep;
  for (double b : b_grid) rep.log_modulus.push_back(eval_log_f(s, {a, b}, {64}).log_mag);
  for (std::size_t i = 1; i < rep.log_modulus.size(); ++i) {
    const double prev = rep.log_modulus[i - 1], cur = rep.log_modulus[i];
    if (std::isinf(prev) && prev < 0) continue;
    const double drop = prev - cur;
    const double slack = 1e-12 * (1.0 + std::fabs(prev));
    if (drop > slack) rep.nondecreasing = false;
    rep.worst_drop = std::max(rep.worst_drop, drop);
  }
  return rep;
}

double check_translation_covariance(const PoissonSample& s, double lambda,
                                    std::span<const std::complex<double>> z_grid,
                                    PrecisionConfig p) {
  p.validate();
  if (s.offset() != 0.0) throw InvalidParameter("covariance check needs an unshifted sample");
  const mpfr_prec_t bits = p.bits;
  const auto pts = s.points();
  if (std::binary_search(pts.begin(), pts.end(), -lambda))
    throw InvalidParameter("-lambda is a sample point");
  for (auto z : z_grid)
    if (z.imag() == 0.0)
      for (double x : pts)
        if (x + lambda == z.real()) throw InvalidParameter("grid point hits a shifted sample point");

  MpReal zero(bits), neg_lambda(-lambda, bits);
  const MpLogProduct at_minus_lambda = mp_log_product(pts, 0.0, neg_lambda, zero, bits);
  MpReal worst(bits), dm(bits), da(bits), re(bits), im(bits), t(bits);
  for (auto z : z_grid) {
    MpReal zr(z.real(), bits), zi(z.imag(), bits);
    const MpLogProduct lhs = mp_log_product(pts, lambda, zr, zi, bits);
    MpReal zr_shift = zr - MpReal(lambda, bits);
    const MpLogProduct num = mp_log_product(pts, 0.0, zr_shift, zi, bits);
    if (lhs.zero || num.zero) {
      if (lhs.zero != num.zero) return std::numeric_limits<double>::infinity();
      continue;
    }
    // exp(dm + i da) - 1 with dm, da the log differences of the two sides
    mpfr_sub(dm.get(), lhs.log_mag.get(), num.log_mag.get(), MPFR_RNDN);
    mpfr_add(dm.get(), dm.get(), at_minus_lambda.log_mag.get(), MPFR_RNDN);
    mpfr_sub(da.get(), lhs.arg.get(), num.arg.get(), MPFR_RNDN);
    mpfr_add(da.get(), da.get(), at_minus_lambda.arg.get(), MPFR_RNDN);
    MpReal two_pi(bits);
    mpfr_const_pi(two_pi.get(), MPFR_RNDN);
    mpfr_mul_ui(two_pi.get(), two_pi.get(), 2, MPFR_RNDN);
    mpfr_remainder(da.get(), da.get(), two_pi.get(), MPFR_RNDN);
    mpfr_exp(t.get(), dm.get(), MPFR_RNDN);
    mpfr_cos(re.get(), da.get(), MPFR_RNDN);
    mpfr_mul(re.get(), re.get(), t.get(), MPFR_RNDN);
    mpfr_sub_ui(re.get(), re.get(), 1, MPFR_RNDN);
    mpfr_sin(im.get(), da.get(), MPFR_RNDN);
    mpfr_mul(im.get(), im.get(), t.get(), MPFR_RNDN);
    mpfr_hypot(t.get(), re.get(), im.get(), MPFR_RNDN);
    if (mpfr_cmp(t.get(), worst.get()) > 0) mpfr_set(worst.get(), t.get(), MPFR_RNDN);
  }
  return worst.to_double();
}

std::vector<double> window_stabilization(const PoissonSample& s,
                                         std::span<const double> halfwidths, int n_max,
                                         PrecisionConfig p) {
  std::vector<double> medians;
  for (double m : halfwidths) {
    if (2.0 * m > s.window_halfwidth())
      throw InvalidParameter("stabilization needs the sample window to cover 2m");
    const auto inner = coefficients_product(restrict_window(s, m), n_max, p);
    const auto outer = coefficients_product(restrict_window(s, 2.0 * m), n_max, p);
    std::vector<double> rel;
    for (int j = 1; j <= n_max; ++j)
      rel.push_back(std::exp2(log2_relative_difference(inner.e[j], outer.e[j])));
    std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
    medians.push_back(rel[rel.size() / 2]);
  }
  return medians;
}

}  // namespace plab
