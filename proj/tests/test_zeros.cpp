#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/saddle.hpp"
#include "poisson_lab/zeros.hpp"

using namespace plab;
using std::numbers::pi;

namespace {

/// Taylor array of cos(pi x - theta) at x = 0, in normalized form.
DerivativeCoefficients cosine_table(double theta, int r_max, unsigned bits = 256) {
  DerivativeCoefficients d;
  d.k = 1;
  d.normalized = true;
  d.theta = theta;
  MpReal pw(1.0, bits), pim(bits), fact(1.0, bits);
  mpfr_const_pi(pim.get(), MPFR_RNDN);
  for (int r = 0; r <= r_max; ++r) {
    if (r > 0) {
      pw = pw * pim;
      fact = fact * MpReal(static_cast<double>(r), bits);
    }
    d.a.push_back(pw / fact * MpReal(std::cos(theta - r * pi / 2.0), bits));
  }
  d.scaled = d.a;
  return d;
}

ZeroSet from_list(std::vector<double> z, double W) {
  ZeroSet zs;
  zs.zeros = std::move(z);
  zs.window_halfwidth = W;
  zs.k = 1;
  return zs;
}

}  // namespace

TEST_CASE("default truncation order") {
  CHECK(default_r_max(5.0) == static_cast<int>(std::ceil(40.0 * pi / std::log(2.0))));
  CHECK(default_r_max(5.0) == 182);
}

TEST_CASE("evaluation of the cubic's derivatives") {
  const PoissonSample s({1.0, -2.0, 4.0}, 5.0);
  const auto c = coefficients_product(s, 3, {256});
  const auto d3 = derivative_coefficients(c, s, 3, 0, std::nullopt);
  for (double x : {-3.0, 0.0, 0.5, 10.0}) CHECK(eval_fk(d3, x) == 0.75);
  const auto d1 = derivative_coefficients(c, s, 1, 2, std::nullopt);
  CHECK(eval_fk(d1, 0.0) == -0.75);
  CHECK(eval_fk(d1, 2.0) == doctest::Approx(-0.75 - 1.5 + 1.5));
  const auto d2 = differentiate(d1);
  CHECK(d2.k == 2);
  CHECK(eval_fk(d2, 1.0) == doctest::Approx(-0.75 + 0.75));
}

TEST_CASE("normalized evaluation at 0 is a[0] / A_k") {
  const auto s = sample_poisson(600.0, 1.0, 12);
  const int k = 30;
  const auto sp = find_saddle(s, k, default_saddle_tolerance(k));
  const auto c = coefficients_product(s, k + 20, PrecisionConfig::for_degree(k + 20));
  const auto d = derivative_coefficients(c, s, k, 20, sp.sigma);
  CHECK(eval_fk(d, 0.0) == d.scaled[0].to_double());
  CHECK(d.scaled[0].to_double() == doctest::Approx((d.a[0] * MpReal(std::exp(-d.amplitude.log_mag), 256)).to_double()).epsilon(1e-12));
}

TEST_CASE("Horner agrees with synthetic differentiation") {
  const auto s = sample_poisson(60.0, 1.0, 44);
  const int n = static_cast<int>(s.size());
  const auto p = PrecisionConfig::for_degree(n);
  const auto c = coefficients_product(s, n, p);
  const int k = 10;
  const double x = 0.3;
  const auto d = derivative_coefficients(c, s, k, n - k, std::nullopt);
  std::vector<MpReal> poly = c.e;
  for (int step = 0; step < k; ++step) {
    std::vector<MpReal> next;
    for (std::size_t j = 1; j < poly.size(); ++j)
      next.push_back(poly[j] * MpReal(static_cast<double>(j), p.bits));
    poly = std::move(next);
  }
  MpReal h(p.bits), xm(x, p.bits);
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) h = h * xm + *it;
  CHECK(std::fabs(eval_fk(d, x) / h.to_double() - 1.0) < 1e-8);
}

TEST_CASE("pure cosine zeros") {
  const double W = 5.0;
  const auto d = cosine_table(0.0, default_r_max(W));
  const double tol = 1e-9;
  const auto zs = find_real_zeros(d, W, 0.05, tol);
  REQUIRE(zs.zeros.size() == 10);
  for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
    CHECK(std::fabs(zs.zeros[i] - (-4.5 + static_cast<double>(i))) <= tol);
    const auto [lo, hi] = zs.brackets[i];
    CHECK(eval_fk(d, lo) * eval_fk(d, hi) <= 0.0);
  }
  const auto theta = cosine_table(0.7, default_r_max(W));
  for (double z : find_real_zeros(theta, W).zeros)
    CHECK(std::fabs(std::cos(pi * z - 0.7)) < 1e-8);
  CHECK_THROWS_AS(find_real_zeros(d, W, 0.2), InvalidParameter);
}

TEST_CASE("a grid node on a zero is nudged, not lost") {
  // Zeros at -0.5 + m sit exactly on the 0.05 grid.
  const auto d = cosine_table(0.0, default_r_max(2.0));
  const auto zs = find_real_zeros(d, 2.0, 0.05);
  CHECK(zs.zeros.size() == 4);
}

TEST_CASE("tail control") {
  const auto d = cosine_table(0.3, 40);
  CHECK(tail_estimate(d, 0.0) == 0.0);
  CHECK(tail_estimate(d, 1.0) < 1e-12);
  CHECK_NOTHROW(eval_fk(d, 1.0));
  CHECK_THROWS_AS(eval_fk(d, 6.0), WindowTooLarge);
}

TEST_CASE("cosine comparison on the pure cosine") {
  const double W = 3.0;
  const int r = default_r_max(W);
  const auto d = cosine_table(0.4, r);
  // The derivative table in the same units.
  auto next = differentiate(d);
  const auto cc = cosine_compare(d, next, W);
  CHECK(cc.sup_error_f < 1e-9);
  CHECK(cc.sup_error_fprime < 1e-8);
  CHECK(cc.grid_step == 0.01);
}

TEST_CASE("lattice matching") {
  const double theta = 0.9;
  std::vector<double> lattice;
  for (int m = -6; m <= 6; ++m) {
    const double x = theta / pi + 0.5 + m;
    if (std::fabs(x) <= 5.0) lattice.push_back(x);
  }
  const auto exact = match_zero_sets(from_list(lattice, 5.0), theta, 0.05);
  CHECK(exact.unmatched_found.empty());
  CHECK(exact.unmatched_lattice.empty());
  CHECK(exact.max_distance == 0.0);
  CHECK(exact.matched_fraction == 1.0);
  CHECK(exact.radius == doctest::Approx(0.1));

  SplitMix64 rng(5);
  std::vector<double> jitter = lattice;
  for (double& x : jitter) x += 0.02 * (rng.uniform01() - 0.5);
  const auto j = match_zero_sets(from_list(jitter, 5.0), theta, 0.05);
  CHECK(j.unmatched_found.empty());
  CHECK(j.max_distance <= 0.02);

  // Symmetry of the pairing.
  std::vector<double> noisy = lattice;
  noisy.push_back(0.123);
  noisy.erase(noisy.begin() + 3);
  std::sort(noisy.begin(), noisy.end());
  const auto ab = mutual_nearest_pairs(noisy, lattice, 0.1);
  const auto ba = mutual_nearest_pairs(lattice, noisy, 0.1);
  REQUIRE(ab.size() == ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) {
    CHECK(ab[i].first == ba[i].second);
    CHECK(ab[i].second == ba[i].first);
  }
  CHECK_THROWS_AS(match_zero_sets(from_list(lattice, 5.0), theta, 0.25, 0.5), InvalidParameter);
}

TEST_CASE("spacing statistics") {
  std::vector<double> lattice;
  for (int m = -5; m < 5; ++m) lattice.push_back(m + 0.5);
  const auto sr = spacing_stats(from_list(lattice, 5.0));
  CHECK_FALSE(sr.empty);
  CHECK(sr.gaps.size() == 9);
  for (double g : sr.gaps) CHECK(g == 1.0);
  CHECK(sr.max_abs_dev_from_1 == 0.0);
  for (double f : sr.fractional_parts) CHECK(f == 0.5);

  SplitMix64 rng(8);
  for (double& x : lattice) x += 0.02 * (rng.uniform01() - 0.5);
  CHECK(spacing_stats(from_list(lattice, 5.0)).max_abs_dev_from_1 <= 0.02);
  CHECK(spacing_stats(from_list({0.3}, 5.0)).empty);
}

TEST_CASE("zeros of a high derivative on a random sample") {
  const int k = 100;
  const double W = 5.0;
  for (std::uint64_t seed : {70'000ULL, 70'001ULL}) {
    const auto s = sample_poisson(1000.0, 1.0, seed);
    const auto sp = find_saddle(s, k, default_saddle_tolerance(k));
    const int r_max = default_r_max(W);
    const auto c = coefficients_product(s, k + r_max, PrecisionConfig::for_degree(k + r_max));
    const auto d = derivative_coefficients(c, s, k, r_max, sp.sigma);
    const auto zs = find_real_zeros(d, W);
    const auto fine = find_real_zeros(d, W, 0.025);
    CHECK(fine.zeros.size() == zs.zeros.size());
    CHECK(std::fabs(static_cast<double>(zs.zeros.size()) - 2.0 * W) <= 2.0);
    for (double g : spacing_stats(zs).gaps) {
      CHECK(g >= 0.7);
      CHECK(g <= 1.3);
    }
    const auto next = differentiate(d);
    int steep = 0;
    for (double z : zs.zeros)
      if (std::fabs(eval_series_scaled(next, z, d.amplitude)) >= pi / 2 * 0.7) ++steep;
    CHECK(steep >= 0.9 * static_cast<double>(zs.zeros.size()));
    for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
      const auto [lo, hi] = zs.brackets[i];
      CHECK(eval_fk(d, lo) * eval_fk(d, hi) <= 0.0);
    }
  }
}
