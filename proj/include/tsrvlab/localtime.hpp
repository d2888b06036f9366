#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "tsrvlab/error.hpp"
#include "tsrvlab/simulate.hpp"

namespace tsrv {

/// Discrete Tanaka estimate of the local time at `level`:
/// |X_N - a| - |X_0 - a| - sum_i sgn(X_i - a)(X_{i+1} - X_i), sgn(0) = -1.
///
/// Evaluated step by step: a step that stays on one side of `level` contributes
/// exactly zero and a step that crosses it contributes 2 |X_{i+1} - a|, so the
/// estimate is never negative.
template <typename Derived>
double tanaka_local_time(const Eigen::DenseBase<Derived>& values, double level)
{
  const auto& v = values.derived();
  if (v.size() < 2) {
    throw DomainError("tanaka_local_time: need at least two values");
  }
  double sum = 0.0;
  bool above = v.coeff(0) > level;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double x = v.coeff(i);
    const bool now_above = x > level;
    if (now_above != above) {
      sum += 2.0 * std::abs(x - level);
      above = now_above;
    }
  }
  return sum;
}

struct CrossingStatistic
{
  Eigen::Index count = 0;
  /// count / sqrt(n), n the number of increments
  double normalized = 0.0;
};

/// Number of steps with X_{i-1} < a <= X_i or X_i < a <= X_{i-1}.
template <typename Derived>
CrossingStatistic crossing_statistic(const Eigen::DenseBase<Derived>& values, double level)
{
  const auto& v = values.derived();
  if (v.size() < 2) {
    throw DomainError("crossing_statistic: need at least two values");
  }
  Eigen::Index count = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double x = v.coeff(i - 1);
    const double y = v.coeff(i);
    if ((x < level && level <= y) || (y < level && level <= x)) {
      ++count;
    }
  }
  return {count, static_cast<double>(count) / std::sqrt(static_cast<double>(v.size() - 1))};
}

enum class LocalTimeMethod
{
  Tanaka,
  Crossing,
};

std::string to_string(LocalTimeMethod method);

/// Local times at the rounding midpoints log((k + 1/2) alpha), k = k_lo..k_hi.
struct LocalTimeProfile
{
  double alpha = 0.01;
  std::int64_t k_lo = 1;
  std::int64_t k_hi = 0;
  Eigen::VectorXd levels;
  Eigen::VectorXd local_time;
  LocalTimeMethod method = LocalTimeMethod::Tanaka;
  /// Increments in the grid the estimates were taken from.
  Eigen::Index source_steps = 0;

  Eigen::Index size() const noexcept { return levels.size(); }
};

/// Evaluates every level within two fine-step standard deviations of the path's range.
/// The crossing method rescales counts by sigma sqrt(T) sqrt(pi/2) and needs constant sigma.
LocalTimeProfile local_time_profile(const MasterPath& path, double alpha, LocalTimeMethod method);

/// (1 / (2 sqrt(pi))) sum_k L_k log((k+1)/k)^2, the small-gamma limit of gamma <f(X), f(X)>_T.
double thm2_limit(const LocalTimeProfile& profile);

/// (1 / (sigma sqrt(T))) sqrt(2/pi) sum_k L_k log((k+1)/k)^2, the pure-rounding limit of TSRV / sqrt(n_bar).
double thm3_limit(const LocalTimeProfile& profile, double sigma, double horizon);

} // namespace tsrv
