#pragma once

#include <cmath>
#include <complex>

namespace plab {

/// Neumaier's variant of Kahan summation.
template <typename T>
class NeumaierSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (magnitude(sum_) >= magnitude(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  template <typename U>
  static auto magnitude(const U& v) { return std::abs(v); }

  T sum_{};
  T comp_{};
};

/// Complex sums compensate each component independently.
template <typename R>
class NeumaierSum<std::complex<R>> {
 public:
  void add(std::complex<R> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  std::complex<R> value() const { return {re_.value(), im_.value()}; }

 private:
  NeumaierSum<R> re_, im_;
};

}  // namespace plab
