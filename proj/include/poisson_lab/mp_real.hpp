#pragma once

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace plab {

/// Owning wrapper around an mpfr_t. Precision is fixed at construction and
/// carried through copies. Hot loops reach for get() and call MPFR directly.
class MpReal {
 public:
  explicit MpReal(mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  MpReal(double x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  MpReal(MpReal&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  MpReal& operator=(MpReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~MpReal() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t bits() const noexcept { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

  /// Natural log of |x| without leaving the MPFR exponent range;
  /// -inf for zero.
  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    long exp2 = 0;
    const double mant = mpfr_get_d_2exp(&exp2, v_, MPFR_RNDN);
    return std::log(std::fabs(mant)) + static_cast<double>(exp2) * std::log(2.0);
  }

  std::string to_string(int digits = 20) const {
    char* buf = nullptr;
    const std::string fmt = "%." + std::to_string(digits) + "Rg";
    mpfr_asprintf(&buf, fmt.c_str(), v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

 private:
  mpfr_t v_;
};

inline MpReal operator+(const MpReal& a, const MpReal& b) {
  MpReal r(std::max(a.bits(), b.bits()));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline MpReal operator-(const MpReal& a, const MpReal& b) {
  MpReal r(std::max(a.bits(), b.bits()));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline MpReal operator*(const MpReal& a, const MpReal& b) {
  MpReal r(std::max(a.bits(), b.bits()));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline MpReal operator/(const MpReal& a, const MpReal& b) {
  MpReal r(std::max(a.bits(), b.bits()));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
inline MpReal abs(const MpReal& a) {
  MpReal r(a.bits());
  mpfr_abs(r.get(), a.get(), MPFR_RNDN);
  return r;
}

/// |a - b| / |b|, evaluated in the wider of the two precisions and returned
/// as log2 so that differences far below double range stay visible.
inline double log2_relative_difference(const MpReal& a, const MpReal& b) {
  MpReal d = a - b;
  if (d.is_zero()) return -std::numeric_limits<double>::infinity();
  if (b.is_zero()) return std::numeric_limits<double>::infinity();
  return (d.log_abs() - b.log_abs()) / std::log(2.0);
}

}  // namespace plab
