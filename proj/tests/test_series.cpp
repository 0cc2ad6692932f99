#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/sampler.hpp"
#include "poisson_lab/series.hpp"
#include "poisson_lab/stats.hpp"

using namespace plab;
using cd = std::complex<double>;

namespace {

PoissonSample cubic() { return PoissonSample({1.0, -2.0, 4.0}, 5.0); }

double rel(double got, double want) { return std::fabs(got / want - 1.0); }

}  // namespace

TEST_CASE("precision rule") {
  CHECK(PrecisionConfig::for_degree(10).bits == 256);
  CHECK(PrecisionConfig::for_degree(300).bits == 3950);
  CHECK_THROWS_AS(PrecisionConfig{32}.validate(), InvalidParameter);
  CHECK_NOTHROW(PrecisionConfig{64}.validate());
}

TEST_CASE("log f on the cubic") {
  const auto s = cubic();
  for (unsigned bits : {64u, 256u}) {
    const auto at0 = eval_log_f(s, 0.0, {bits});
    CHECK(at0.log_mag == 0.0);
    CHECK(at0.arg == 0.0);
    CHECK(eval_log_f(s, 1.0, {bits}).is_zero());
    const cd f2 = eval_log_f(s, 2.0, {bits}).to_complex();
    CHECK(std::abs(f2 - cd(-1.0, 0.0)) < 1e-14);
    const cd z{0.3, 1.7};
    const cd direct = (1.0 - z) * (1.0 + z / 2.0) * (1.0 - z / 4.0);
    CHECK(std::abs(eval_log_f(s, z, {bits}).to_complex() / direct - 1.0) < 1e-14);
  }
}

TEST_CASE("log f conjugation symmetry and precision paths agree") {
  const auto s = sample_poisson(300.0, 1.0, 11);
  for (cd z : {cd{0.5, 3.0}, cd{-20.0, 7.5}, cd{100.0, 0.25}}) {
    const auto a = eval_log_f(s, z, {256});
    const auto b = eval_log_f(s, std::conj(z), {256});
    CHECK(a.log_mag == doctest::Approx(b.log_mag).epsilon(1e-14));
    CHECK(std::fabs(wrap_angle(a.arg + b.arg)) < 1e-10);
    const auto c = eval_log_f(s, z, {64});
    CHECK(std::fabs(c.log_mag - a.log_mag) < 1e-10);
    CHECK(std::fabs(wrap_angle(c.arg - a.arg)) < 1e-10);
  }
}

TEST_CASE("h on the cubic and its symmetries") {
  const auto s = cubic();
  CHECK(eval_h(s, 0.0).real() == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK_THROWS_AS(eval_h(s, 4.0), PoleError);
  const auto t = sample_poisson(200.0, 1.0, 3);
  const cd z{1.25, 0.5};
  CHECK(std::abs(eval_h(t, std::conj(z)) - std::conj(eval_h(t, z))) < 1e-13);
}

TEST_CASE("h far up the imaginary axis is bounded by count / height") {
  const auto s = sample_poisson(1000.0, 1.0, 4);
  const double y = 1e6;
  CHECK(std::abs(eval_h(s, {0.0, y})) <= static_cast<double>(s.size()) / y);
}

TEST_CASE("coefficients of the cubic by both routes") {
  const auto s = cubic();
  const std::vector<double> want{1.0, -0.75, -0.375, 0.125};
  for (const auto& c : {coefficients_product(s, 3, {256}), coefficients_newton(s, 3, {256})}) {
    REQUIRE(c.n_max() == 3);
    CHECK(c.n_points == 3);
    for (int j = 0; j <= 3; ++j) CHECK(c.e[j].to_double() == want[j]);
  }
  const PoissonSample one({2.0}, 3.0);
  const auto c1 = coefficients_newton(one, 1, {256});
  CHECK(c1.e[0].to_double() == 1.0);
  CHECK(c1.e[1].to_double() == -0.5);
  CHECK_THROWS_AS(coefficients_product(s, 4, {256}), InvalidParameter);
  CHECK_THROWS_AS(coefficients_product(PoissonSample({0.0, 1.0}, 2.0), 2, {256}), InvalidSample);
}

TEST_CASE("e1 equals h(0)") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto s = sample_poisson(500.0, 1.0, seed);
    const auto c = coefficients_product(s, 1, {256});
    CHECK(c.e[0].to_double() == 1.0);
    CHECK(rel(c.e[1].to_double(), eval_h(s, 0.0).real()) < 1e-12);
  }
}

TEST_CASE("product and Newton routes agree on random samples") {
  for (std::uint64_t seed = 100; seed < 103; ++seed) {
    const auto s = sample_poisson(250.0, 1.0, seed);
    const int n = 60;
    const auto p = PrecisionConfig::for_degree(n);
    const double d =
        max_log2_relative_difference(coefficients_product(s, n, p), coefficients_newton(s, n, p));
    CHECK(d <= -static_cast<double>(p.bits) / 2.0);
  }
}

TEST_CASE("derivative coefficients") {
  const auto s = cubic();
  const auto c = coefficients_product(s, 3, {256});
  const auto d3 = derivative_coefficients(c, s, 3, 0, std::nullopt);
  REQUIRE(d3.r_max() == 0);
  CHECK(d3.a[0].to_double() == 0.75);
  CHECK_FALSE(d3.normalized);
  CHECK(d3.complete);

  const auto d0 = derivative_coefficients(c, s, 0, 3, std::nullopt);
  for (int r = 0; r <= 3; ++r) CHECK(d0.a[r].to_double() == c.e[r].to_double());

  // f'(z) of the cubic: -0.75 - 0.75 z + 0.375 z^2.
  const auto d1 = derivative_coefficients(c, s, 1, 2, std::nullopt);
  CHECK(d1.a[0].to_double() == -0.75);
  CHECK(d1.a[1].to_double() == -0.75);
  CHECK(d1.a[2].to_double() == 0.375);
  CHECK_THROWS_AS(derivative_coefficients(c, s, 2, 2, std::nullopt), InvalidParameter);
}

TEST_CASE("derivative series matches k-fold synthetic differentiation") {
  const auto s = sample_poisson(80.0, 1.0, 21);
  const int n = static_cast<int>(std::min<std::size_t>(s.size(), 200));
  const auto p = PrecisionConfig::for_degree(n);
  const auto c = coefficients_product(s, n, p);
  const double x = 0.1;
  for (int k : {1, 5, 12, 20}) {
    const auto d = derivative_coefficients(c, s, k, n - k, std::nullopt);
    MpReal series(p.bits), xp(1.0, p.bits), xm(x, p.bits);
    for (int r = 0; r <= d.r_max(); ++r) {
      series = series + d.a[r] * xp;
      xp = xp * xm;
    }
    // Differentiate the coefficient list k times, then Horner.
    std::vector<MpReal> poly = c.e;
    for (int step = 0; step < k; ++step) {
      std::vector<MpReal> next;
      for (std::size_t j = 1; j < poly.size(); ++j)
        next.push_back(poly[j] * MpReal(static_cast<double>(j), p.bits));
      poly = std::move(next);
    }
    MpReal h(p.bits);
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) h = h * xm + *it;
    CHECK(std::exp2(log2_relative_difference(series, h)) < 1e-10);
  }
}

TEST_CASE("normalized derivative coefficients stay bounded") {
  const auto s = sample_poisson(800.0, 1.0, 31);
  const int k = 80;
  // Saddle approximated by i k / pi; amplitude only needs to be of the right size here.
  const auto c = coefficients_product(s, k + 6, PrecisionConfig::for_degree(k + 6));
  const auto d = derivative_coefficients(c, s, k, 6, cd{0.0, k / std::numbers::pi});
  CHECK(d.normalized);
  double fact = 1.0;
  for (int r = 0; r <= 6; ++r) {
    if (r) fact *= r;
    CHECK(std::fabs(d.scaled[r].to_double() * fact / std::pow(std::numbers::pi, r)) < 3.0);
  }
}

TEST_CASE("modulus increases away from the real axis") {
  const auto s = cubic();
  const std::vector<double> grid{0.0, 1.0, 2.0};
  const auto rep = check_increasing_modulus(s, 0.0, grid);
  CHECK(rep.nondecreasing);
  CHECK(rep.log_modulus[1] > rep.log_modulus[0]);
  CHECK(rep.log_modulus[2] > rep.log_modulus[1]);

  const std::vector<double> pair{-1.5, 1.5};
  const auto sym = check_increasing_modulus(s, 0.7, pair);
  CHECK(sym.log_modulus[0] == doctest::Approx(sym.log_modulus[1]).epsilon(1e-15));

  std::vector<double> g;
  for (int i = 0; i < 50; ++i) g.push_back(100.0 * i / 49.0);
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = sample_poisson(50.0, 1.0, 5000 + seed);
    for (double a : {0.0, 5.0, -5.0})
      if (!check_increasing_modulus(t, a, g).nondecreasing) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("translation covariance") {
  const auto s = cubic();
  const std::vector<cd> z3{cd{3.0, 0.0}};
  const PrecisionConfig p{256};
  CHECK(check_translation_covariance(s, 0.0, z3, p) == 0.0);
  CHECK(check_translation_covariance(s, 1.0, z3, p) < std::exp2(-256.0 + 8.0));
  CHECK_THROWS_AS(check_translation_covariance(s, 2.0, z3, p), InvalidParameter);

  SplitMix64 rng(9);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto t = sample_poisson(40.0, 1.0, 7000 + i);
    const double lambda = 10.0 * (rng.uniform01() - 0.5);
    const std::vector<cd> z{cd{20.0 * (rng.uniform01() - 0.5), 10.0 * (rng.uniform01() - 0.5)}};
    worst = std::max(worst, check_translation_covariance(t, lambda, z, p));
  }
  CHECK(worst < std::exp2(-128.0));
}

TEST_CASE("window stabilization decreases with the window") {
  const int k = 10;
  const std::vector<double> ms{5.0 * k, 10.0 * k, 20.0 * k};
  std::vector<std::vector<double>> per_m(ms.size());
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto s = sample_poisson(40.0 * k, 1.0, 300 + seed);
    const auto med = window_stabilization(s, ms, k + 6, {256});
    for (std::size_t i = 0; i < ms.size(); ++i) per_m[i].push_back(med[i]);
  }
  const double a = stats::median(per_m[0]), b = stats::median(per_m[1]), c = stats::median(per_m[2]);
  MESSAGE("stabilization medians " << a << " " << b << " " << c);
  CHECK(a > b);
  CHECK(b > c);
}
