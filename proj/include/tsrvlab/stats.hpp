#pragma once

#include <span>

namespace tsrv {

double mean(std::span<const double> values);
/// Unbiased sample variance (divisor M - 1).
double sample_variance(std::span<const double> values);
/// Kolmogorov-Smirnov distance between the empirical law of `values` and N(0, 1).
double ks_distance_normal(std::span<const double> values);
/// Median of three.
double median3(double a, double b, double c) noexcept;

} // namespace tsrv
