#pragma once

#include <cmath>
#include <numbers>

namespace tsrv {

inline double normal_pdf(double z) noexcept
{
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Phi(z), accurate in the lower tail.
inline double normal_cdf(double z) noexcept
{
  return 0.5 * std::erfc(-z * (0.5 * std::numbers::sqrt2));
}

/// 1 - Phi(z), accurate in the upper tail.
inline double normal_sf(double z) noexcept
{
  return 0.5 * std::erfc(z * (0.5 * std::numbers::sqrt2));
}

} // namespace tsrv
