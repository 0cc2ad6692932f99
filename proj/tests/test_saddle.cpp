#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/saddle.hpp"
#include "poisson_lab/stats.hpp"

using namespace plab;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {
PoissonSample cubic() { return PoissonSample({1.0, -2.0, 4.0}, 5.0); }
}  // namespace

TEST_CASE("phase function values") {
  const auto s = cubic();
  const cd z{0.4, 1.3};
  const auto p0 = eval_phase(s, 0, z, {256});
  const auto lf = eval_log_f(s, z, {256});
  CHECK(p0.log_mag == doctest::Approx(lf.log_mag).epsilon(1e-15));
  CHECK(p0.arg == doctest::Approx(lf.arg).epsilon(1e-15));

  const auto p = eval_phase(s, 1, 2.0, {256});
  CHECK(p.log_mag == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(std::fabs(std::fabs(p.arg) - pi) < 1e-14);

  const auto t = sample_poisson(100.0, 1.0, 8);
  for (int k : {1, 5, 30}) {
    const cd w{3.5, 9.0};
    CHECK(eval_phase(t, k, w, {256}).log_mag ==
          doctest::Approx(eval_phase(t, k, std::conj(w), {256}).log_mag).epsilon(1e-14));
  }
  CHECK_THROWS_AS(eval_phase(s, 1, 0.0, {256}), PoleError);
}

TEST_CASE("phase derivatives") {
  const auto s = cubic();
  const cd z{0.0, 1.0};
  CHECK(std::abs(eval_phase_derivative(s, 0, z, 1) - eval_h(s, z)) < 1e-15);
  const cd want = -2.0 / z + 1.0 / (z - 1.0) + 1.0 / (z + 2.0) + 1.0 / (z - 4.0);
  CHECK(std::abs(eval_phase_derivative(s, 2, z, 1) - want) < 1e-15);
  CHECK_THROWS_AS(eval_phase_derivative(s, 2, z, 0), InvalidParameter);
  CHECK_THROWS_AS(eval_phase_derivative(s, 2, 1.0, 1), PoleError);
}

TEST_CASE("phase derivatives match central differences") {
  const auto s = sample_poisson(200.0, 1.0, 17);
  const double h = 1e-6;
  for (int k : {0, 10, 50}) {
    const cd z{2.5, k / pi + 3.0};
    for (int r = 1; r <= 3; ++r) {
      const cd fd =
          (eval_phase_derivative(s, k, z + h, r) - eval_phase_derivative(s, k, z - h, r)) / (2.0 * h);
      const cd exact = eval_phase_derivative(s, k, z, r + 1);
      CHECK(std::abs(fd / exact - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("saddle on random samples") {
  const int k = 100;
  int converged = 0;
  std::vector<double> curv;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_poisson(1000.0, 1.0, 40'000 + seed);
    const double tol = default_saddle_tolerance(k);
    SaddlePoint sp;
    try {
      sp = find_saddle(s, k, tol);
    } catch (const SaddleFailure&) {
      continue;
    }
    ++converged;
    CHECK(sp.residual <= tol);
    CHECK(sp.sigma.imag() > 0.0);
    CHECK(std::abs(sp.sigma - cd(0.0, k / pi)) <= k / 2.0);
    CHECK(std::abs(eval_phase_derivative(s, k, sp.sigma, 1)) == doctest::Approx(sp.residual));
    for (const cd& z : sp.trace) CHECK(z.imag() > 0.0);
    for (std::size_t i = 1; i < sp.residual_trace.size(); ++i)
      CHECK(sp.residual_trace[i] < sp.residual_trace[i - 1]);
    curv.push_back(std::abs(sp.sigma * sp.sigma * sp.second_derivative / double(k) - 1.0));

    const auto diag = saddle_diagnostics(s, sp);
    CHECK(diag.residual <= tol);
    CHECK(diag.probes.size() == 16);
    CHECK(std::isfinite(diag.third_derivative_ratio));
  }
  CHECK(converged >= 19);
  CHECK(stats::quantile(curv, 0.9) <= 0.5);
}

TEST_CASE("saddle failure carries the trace") {
  const auto s = sample_poisson(500.0, 1.0, 3);
  try {
    find_saddle(s, 50, 1e-300, 2);
    FAIL("expected a saddle failure");
  } catch (const SaddleFailure& e) {
    CHECK_FALSE(e.trace().empty());
  }
  CHECK_THROWS_AS(find_saddle(s, 0, 1e-10), InvalidParameter);
  CHECK_THROWS_AS(find_saddle(s, 10, 0.0), InvalidParameter);
}

TEST_CASE("scaled h concentrates near -i pi around i/pi") {
  const int k = 400, replicas = 500, probes = 8;
  std::vector<double> dev1, dev4;
  for (int rep = 0; rep < replicas; ++rep) {
    const auto s = sample_poisson(4000.0, 1.0, 80'000 + rep);
    for (int j = 0; j < probes; ++j) {
      const cd u = std::polar(1.0, 2.0 * pi * j / probes);
      for (double m : {1.0, 4.0}) {
        const cd y = cd(0.0, 1.0 / pi) + m / std::sqrt(double(k)) * u;
        const double dev = std::abs(eval_h_scaled(s, k, y) + cd(0.0, pi));
        (m == 1.0 ? dev1 : dev4).push_back(dev);
      }
    }
  }
  const double q1 = stats::quantile(dev1, 0.95), q4 = stats::quantile(dev4, 0.95);
  MESSAGE("95th percentiles " << q1 << " " << q4);
  CHECK(q4 <= 4.0 * q1);
}
