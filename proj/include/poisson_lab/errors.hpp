#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace plab {

/// Raised when an argument violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point configuration is unusable (e.g. a point sits at the origin).
class InvalidSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested at a pole or branch point.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Taylor evaluation requested outside the radius where the stored
/// coefficients control the tail.
class WindowTooLarge : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Newton iteration for the saddle did not converge or left the upper half
/// plane. Carries every iterate for post-mortem.
class SaddleFailure : public std::runtime_error {
 public:
  SaddleFailure(const std::string& what, std::vector<std::complex<double>> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const std::vector<std::complex<double>>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::complex<double>> trace_;
};

}  // namespace plab
