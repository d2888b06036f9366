#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tsrvlab/contaminate.hpp"
#include "tsrvlab/simulate.hpp"

namespace tsrv {

/// Distribution of the rounded noisy price over rounding cells for one latent x.
///
/// Cell k >= 1 collects log-noisy prices z in [log((k-1/2)alpha), log((k+1/2)alpha));
/// the floor cell collects z < log(alpha/2), whose observation is log(alpha) like cell 1.
struct BandDecomposition
{
  double x = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  std::int64_t k_lo = 1;
  std::int64_t k_hi = 0;
  double p_floor = 0.0;
  /// p[k - k_lo] for k in [k_lo, k_hi].
  std::vector<double> p;
  /// Mass outside the floor cell and the included cells.
  double tail = 0.0;

  double band(std::int64_t k) const noexcept;
  double total() const noexcept;
};

/// Cells within 8 gamma of x (wider when tol demands it) plus the floor cell.
BandDecomposition band_probabilities(double x, double gamma, double alpha, double tol = 1e-12);

/// f, f' and g evaluated together at one latent value.
struct PointMoments
{
  double f = 0.0;
  double f_prime = 0.0;
  double g = 0.0;
};

/// Conditional mean f(x) = E(Y | X = x).
double f_bar(const ContaminationKernel& kernel, double x);
/// f'(x). PureRounding has no derivative and raises UnsupportedError.
double f_prime(const ContaminationKernel& kernel, double x);
/// Conditional noise variance g(x) = E((Y - f(X))^2 | X = x).
double g_var(const ContaminationKernel& kernel, double x);
/// All three at once; PureRounding reports f_prime = NaN.
PointMoments point_moments(const ContaminationKernel& kernel, double x);

/// Per-value f, f', g along a path.
struct MomentProfile
{
  Eigen::VectorXd f;
  Eigen::VectorXd f_prime;
  Eigen::VectorXd g;
};

MomentProfile moment_profile(const ContaminationKernel& kernel, const ConstVectorRef& values);

/// Left-point Riemann sums over the master grid, computed in one sweep.
struct PathTargets
{
  /// <f(X), f(X)>_T = int f'(X)^2 sigma^2 dt
  double qv = 0.0;
  /// (4/3) int (f'(X) sigma)^4 dt
  double xi_squared = 0.0;
  /// int g(X)^2 dt
  double g_squared_integral = 0.0;
};

PathTargets path_targets(const ContaminationKernel& kernel, const MasterPath& path);

double qv_target(const ContaminationKernel& kernel, const MasterPath& path);
double xi_squared(const ContaminationKernel& kernel, const MasterPath& path);

/// (8 / (T c^2)) int g^2 dt + c xi^2 T
double avar_thm1(const ContaminationKernel& kernel, const MasterPath& path, double c);
double avar_from_targets(const PathTargets& targets, double horizon, double c);

} // namespace tsrv
