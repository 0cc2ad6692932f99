#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "poisson_lab/mp_real.hpp"

namespace plab {

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

/// Complex number stored as (ln|w|, arg w). Magnitudes like e_k ~ (pi e / k)^k
/// never get exponentiated unless asked for.
struct LogComplex {
  double log_mag = 0.0;  // -inf encodes zero
  double arg = 0.0;      // (-pi, pi]

  static LogComplex zero() { return {-std::numeric_limits<double>::infinity(), 0.0}; }
  static LogComplex one() { return {0.0, 0.0}; }

  static LogComplex from_log(double log_mag, double arg) { return {log_mag, wrap_angle(arg)}; }
  static LogComplex from_log(std::complex<double> log_value) {
    return from_log(log_value.real(), log_value.imag());
  }

  static LogComplex from_complex(std::complex<double> w) {
    if (w == 0.0) return zero();
    return {std::log(std::abs(w)), std::arg(w)};
  }

  static LogComplex from_real(const MpReal& x) {
    if (x.is_zero()) return zero();
    return {x.log_abs(), x.sign() < 0 ? std::numbers::pi : 0.0};
  }

  bool is_zero() const { return std::isinf(log_mag) && log_mag < 0; }

  std::complex<double> to_complex() const {
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_mag), arg);
  }

  double log10_abs() const { return log_mag / std::numbers::ln10; }

  LogComplex conj() const { return {log_mag, wrap_angle(-arg)}; }

  LogComplex& operator*=(const LogComplex& o) {
    log_mag += o.log_mag;
    arg = wrap_angle(arg + o.arg);
    return *this;
  }
  LogComplex& operator/=(const LogComplex& o) {
    log_mag -= o.log_mag;
    arg = wrap_angle(arg - o.arg);
    return *this;
  }

  LogComplex pow(int n) const {
    if (is_zero()) return n == 0 ? one() : zero();
    return from_log(log_mag * n, arg * n);
  }

  /// Sum in log form: factor out the larger magnitude first.
  friend LogComplex operator+(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const LogComplex& big = a.log_mag >= b.log_mag ? a : b;
    const LogComplex& small = a.log_mag >= b.log_mag ? b : a;
    const std::complex<double> ratio =
        std::polar(std::exp(small.log_mag - big.log_mag), small.arg - big.arg);
    const std::complex<double> s = 1.0 + ratio;
    if (s == 0.0) return zero();
    return from_log(big.log_mag + std::log(std::abs(s)), big.arg + std::arg(s));
  }
  friend LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }
  friend LogComplex operator/(LogComplex a, const LogComplex& b) { return a /= b; }
};

}  // namespace plab
