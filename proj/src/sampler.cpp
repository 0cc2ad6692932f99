#include "poisson_lab/sampler.hpp"

#include <algorithm>
#include <boost/random/poisson_distribution.hpp>
#include <cmath>
#include <nlohmann/json.hpp>

#include "poisson_lab/errors.hpp"

namespace plab {

namespace {

void require_window(double halfwidth, double intensity) {
  if (!std::isfinite(halfwidth) || halfwidth < 0.0)
    throw InvalidParameter("window half-width must be finite and >= 0");
  if (!std::isfinite(intensity) || intensity <= 0.0)
    throw InvalidParameter("intensity must be finite and > 0");
}

bool has_adjacent_duplicate(const std::vector<double>& pts) {
  return std::adjacent_find(pts.begin(), pts.end()) != pts.end();
}

}  // namespace

PoissonSample::PoissonSample(std::vector<double> points, double window_halfwidth,
                             double intensity, std::uint64_t seed)
    : halfwidth_(window_halfwidth), intensity_(intensity), seed_(seed) {
  require_window(window_halfwidth, intensity);
  for (double x : points) {
    if (!std::isfinite(x)) throw InvalidSample("non-finite point");
    if (x < -window_halfwidth || x > window_halfwidth)
      throw InvalidSample("point outside window [-M, M]");
  }
  std::sort(points.begin(), points.end());
  if (has_adjacent_duplicate(points)) throw InvalidSample("duplicate points");
  origin_ = std::make_shared<const std::vector<double>>(points);
  points_ = std::move(points);
}

std::vector<double> PoissonSample::gaps() const {
  std::vector<double> out;
  const auto& base = *origin_;
  if (base.size() < 2) return out;
  out.reserve(base.size() - 1);
  for (std::size_t i = 1; i < base.size(); ++i) out.push_back(base[i] - base[i - 1]);
  return out;
}

std::size_t PoissonSample::count_in(double a, double b) const {
  const auto lo = std::lower_bound(points_.begin(), points_.end(), a);
  const auto hi = std::upper_bound(points_.begin(), points_.end(), b);
  return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

bool PoissonSample::operator==(const PoissonSample& o) const {
  return points_ == o.points_ && halfwidth_ == o.halfwidth_ && offset_ == o.offset_ &&
         intensity_ == o.intensity_ && seed_ == o.seed_;
}

PoissonSample sample_poisson(double window_halfwidth, double intensity, std::uint64_t seed) {
  require_window(window_halfwidth, intensity);
  SplitMix64 rng(seed);
  std::vector<double> pts;
  const double mean = 2.0 * window_halfwidth * intensity;
  if (mean > 0.0) {
    boost::random::poisson_distribution<long, double> count_dist(mean);
    const long count = count_dist(rng);
    pts.resize(static_cast<std::size_t>(count));
    // Ties have probability zero; redraw from the same stream if one shows up.
    do {
      for (double& x : pts) x = window_halfwidth * (2.0 * rng.uniform01() - 1.0);
      std::sort(pts.begin(), pts.end());
    } while (has_adjacent_duplicate(pts));
  }
  return PoissonSample(std::move(pts), window_halfwidth, intensity, seed);
}

PoissonSample shift_sample(const PoissonSample& s, double lambda) {
  PoissonSample out;
  out.origin_ = s.origin_;
  out.halfwidth_ = s.halfwidth_;
  out.intensity_ = s.intensity_;
  out.seed_ = s.seed_;
  out.offset_ = s.offset_ + lambda;
  out.points_.reserve(out.origin_->size());
  for (double x : *out.origin_) out.points_.push_back(x + out.offset_);
  return out;
}

PoissonSample restrict_window(const PoissonSample& s, double halfwidth) {
  if (s.offset_ != 0.0) throw InvalidParameter("restrict_window needs an unshifted sample");
  if (!(halfwidth >= 0.0) || halfwidth > s.halfwidth_)
    throw InvalidParameter("nested window must satisfy 0 <= m <= M");
  std::vector<double> pts;
  for (double x : s.points_)
    if (x >= -halfwidth && x <= halfwidth) pts.push_back(x);
  return PoissonSample(std::move(pts), halfwidth, s.intensity_, s.seed_);
}

RescaledSample::RescaledSample(const PoissonSample& base, int scale)
    : base_(&base), scale_(scale) {
  if (scale < 1) throw InvalidParameter("rescale factor k must be >= 1");
}

double RescaledSample::measure(double a, double b) const {
  return static_cast<double>(base_->count_in(a * scale_, b * scale_)) / scale_;
}

RescaledSample rescale_sample(const PoissonSample& s, int k) { return RescaledSample(s, k); }

std::string sample_to_json(const PoissonSample& s) {
  nlohmann::json j;
  j["seed"] = s.seed();
  j["window_halfwidth"] = s.window_halfwidth();
  j["intensity"] = s.intensity();
  if (s.offset() != 0.0) j["offset"] = s.offset();
  j["points"] = std::vector<double>(s.points().begin(), s.points().end());
  return j.dump();
}

PoissonSample sample_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const double offset = j.value("offset", 0.0);
  auto pts = j.at("points").get<std::vector<double>>();
  if (offset != 0.0)
    throw InvalidParameter("shifted samples are exported for audit only");
  return PoissonSample(std::move(pts), j.at("window_halfwidth").get<double>(),
                       j.at("intensity").get<double>(), j.at("seed").get<std::uint64_t>());
}

}  // namespace plab
