#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace plab {

/// SplitMix64: a counter-based 64-bit generator. Output n is a fixed mix of
/// seed + n * golden-gamma, so replica r of a run can use seed base + r and
/// streams stay reproducible and independent of scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Sorted point configuration of a Poisson process restricted to a window.
///
/// Points are held relative to an origin configuration plus a translation
/// offset, so shifting by lambda and back by -lambda restores the original
/// points exactly, and gaps are always read from the unshifted coordinates.
class PoissonSample {
 public:
  /// Explicit configuration on the symmetric window [-M, M]. Points are
  /// sorted here; duplicates or points outside the window are rejected.
  PoissonSample(std::vector<double> points, double window_halfwidth, double intensity = 1.0,
                std::uint64_t seed = 0);

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  double window_halfwidth() const { return halfwidth_; }
  double window_lo() const { return -halfwidth_ + offset_; }
  double window_hi() const { return halfwidth_ + offset_; }
  double offset() const { return offset_; }
  double intensity() const { return intensity_; }
  std::uint64_t seed() const { return seed_; }

  /// Consecutive differences computed from the unshifted coordinates.
  std::vector<double> gaps() const;

  /// Number of points in [a, b].
  std::size_t count_in(double a, double b) const;

  bool operator==(const PoissonSample& o) const;

  friend PoissonSample shift_sample(const PoissonSample& s, double lambda);
  friend PoissonSample restrict_window(const PoissonSample& s, double halfwidth);

 private:
  PoissonSample() = default;

  std::shared_ptr<const std::vector<double>> origin_;
  std::vector<double> points_;
  double halfwidth_ = 0.0;
  double offset_ = 0.0;
  double intensity_ = 1.0;
  std::uint64_t seed_ = 0;
};

/// Draws count ~ Poisson(2 M intensity), then count sorted uniforms on
/// [-M, M]. Bit-identical for identical (M, intensity, seed).
PoissonSample sample_poisson(double window_halfwidth, double intensity, std::uint64_t seed);

/// tau_lambda: every point moves right by lambda. The recorded window moves
/// with it.
PoissonSample shift_sample(const PoissonSample& s, double lambda);

/// Restriction of an unshifted sample to the nested window [-m, m], m <= M.
PoissonSample restrict_window(const PoissonSample& s, double halfwidth);

/// View of N^(k): point x of the base becomes x/k carrying mass 1/k.
class RescaledSample {
 public:
  RescaledSample(const PoissonSample& base, int scale);

  const PoissonSample& base() const { return *base_; }
  int scale() const { return scale_; }
  double mass() const { return 1.0 / scale_; }
  std::size_t size() const { return base_->size(); }
  double point(std::size_t i) const { return base_->points()[i] / scale_; }

  /// N^(k)[a, b] = (1/k) N[k a, k b].
  double measure(double a, double b) const;

 private:
  const PoissonSample* base_;
  int scale_;
};

RescaledSample rescale_sample(const PoissonSample& s, int k);

std::string sample_to_json(const PoissonSample& s);
PoissonSample sample_from_json(const std::string& text);

}  // namespace plab
