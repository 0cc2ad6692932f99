#pragma once

#include <functional>
#include <span>
#include <vector>

namespace plab::stats {

double median(std::vector<double> v);
/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);
double mean(std::span<const double> v);

/// Asymptotic Kolmogorov tail probability with Stephens' finite-n factor.
double kolmogorov_pvalue(double d, std::size_t n);
/// sup |F_n - F| for data against a continuous CDF.
double ks_statistic(std::vector<double> data, const std::function<double(double)>& cdf);

/// Kuiper's V = D+ + D- for data in [0, 1) against Uniform; invariant under
/// rotations of the circle.
double kuiper_statistic(std::vector<double> unit_data);
double kuiper_pvalue(double v, std::size_t n);

/// Upper tail of chi-square with dof degrees of freedom.
double chi_square_pvalue(double statistic, double dof);

/// Pearson correlation.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace plab::stats
