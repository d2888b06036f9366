#include "tsrvlab/stats.hpp"

#include <algorithm>
#include <vector>

#include "tsrvlab/error.hpp"
#include "tsrvlab/normal.hpp"

namespace tsrv {

double mean(std::span<const double> values)
{
  if (values.empty()) {
    throw DomainError("mean of an empty sample");
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values)
{
  if (values.size() < 2) {
    throw DomainError("sample variance needs two or more values");
  }
  const double m = mean(values);
  double sum = 0.0;
  for (double v : values) {
    sum += (v - m) * (v - m);
  }
  return sum / static_cast<double>(values.size() - 1);
}

double ks_distance_normal(std::span<const double> values)
{
  if (values.empty()) {
    throw DomainError("KS distance of an empty sample");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - cdf, cdf - static_cast<double>(i) / m});
  }
  return d;
}

double median3(double a, double b, double c) noexcept
{
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

} // namespace tsrv
