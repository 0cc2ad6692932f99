#include "poisson_lab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "poisson_lab/errors.hpp"

namespace plab::stats {

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InvalidParameter("quantile of an empty set");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double kolmogorov_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::vector<double> data, const std::function<double(double)>& cdf) {
  if (data.empty()) throw InvalidParameter("KS statistic of an empty set");
  std::sort(data.begin(), data.end());
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = cdf(data[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kuiper_statistic(std::vector<double> unit_data) {
  if (unit_data.empty()) throw InvalidParameter("Kuiper statistic of an empty set");
  std::sort(unit_data.begin(), unit_data.end());
  const double n = static_cast<double>(unit_data.size());
  double d_plus = 0.0, d_minus = 0.0;
  for (std::size_t i = 0; i < unit_data.size(); ++i) {
    const double u = unit_data[i];
    d_plus = std::max(d_plus, (static_cast<double>(i) + 1.0) / n - u);
    d_minus = std::max(d_minus, u - static_cast<double>(i) / n);
  }
  return d_plus + d_minus;
}

double kuiper_pvalue(double v, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.155 + 0.24 / sn) * v;
  if (lambda < 0.4) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double a = 2.0 * j * j * lambda * lambda;
    const double term = (2.0 * a - 1.0) * std::exp(-a);
    sum += term;
    if (std::fabs(term) < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_pvalue(double statistic, double dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidParameter("correlation needs paired data");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace plab::stats
