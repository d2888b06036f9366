#include "tsrvlab/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsrv {

namespace {

// sum_k L_k log((k+1)/k)^2
double weighted_sum(const LocalTimeProfile& profile)
{
  double sum = 0.0;
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    const auto k = static_cast<double>(profile.k_lo + i);
    const double jump = std::log1p(1.0 / k);
    sum += profile.local_time[i] * jump * jump;
  }
  return sum;
}

} // namespace

std::string to_string(LocalTimeMethod method)
{
  return method == LocalTimeMethod::Tanaka ? "tanaka" : "crossing";
}

LocalTimeProfile local_time_profile(const MasterPath& path, double alpha, LocalTimeMethod method)
{
  if (!(alpha > 0.0)) {
    throw DomainError("local_time_profile: alpha must be positive");
  }
  const Eigen::VectorXd& x = path.values();
  const double margin = 2.0 * path.model().max_sigma() * std::sqrt(path.fine_dt());
  const double lo = x.minCoeff() - margin;
  const double hi = x.maxCoeff() + margin;

  LocalTimeProfile out;
  out.alpha = alpha;
  out.method = method;
  out.source_steps = path.fine_steps();
  // Smallest k >= 1 with (k + 1/2) alpha >= e^lo, largest with (k + 1/2) alpha <= e^hi.
  out.k_lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::exp(lo) / alpha - 0.5)));
  out.k_hi = static_cast<std::int64_t>(std::floor(std::exp(hi) / alpha - 0.5));
  if (out.k_hi < out.k_lo) {
    out.k_hi = out.k_lo - 1;
    return out;
  }
  if (out.k_hi - out.k_lo > 1'000'000) {
    throw CapacityError("local_time_profile: path spans too many levels");
  }

  double crossing_scale = 0.0;
  if (method == LocalTimeMethod::Crossing) {
    if (!path.model().constant_coefficients()) {
      throw UnsupportedError("crossing local time needs constant sigma");
    }
    crossing_scale = path.model().sigma * std::sqrt(path.grid().horizon) * std::sqrt(std::numbers::pi / 2.0);
  }

  const auto count = static_cast<Eigen::Index>(out.k_hi - out.k_lo + 1);
  out.levels.resize(count);
  out.local_time.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double level = std::log((static_cast<double>(out.k_lo + i) + 0.5) * alpha);
    out.levels[i] = level;
    out.local_time[i] = method == LocalTimeMethod::Tanaka
                            ? tanaka_local_time(x, level)
                            : crossing_scale * crossing_statistic(x, level).normalized;
  }
  return out;
}

double thm2_limit(const LocalTimeProfile& profile)
{
  return weighted_sum(profile) * (0.5 * std::numbers::inv_sqrtpi);
}

double thm3_limit(const LocalTimeProfile& profile, double sigma, double horizon)
{
  if (!(sigma > 0.0) || !(horizon > 0.0)) {
    throw DomainError("thm3_limit: sigma and T must be positive");
  }
  return weighted_sum(profile) * std::sqrt(2.0 / std::numbers::pi) / (sigma * std::sqrt(horizon));
}

} // namespace tsrv
