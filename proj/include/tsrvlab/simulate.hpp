#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace tsrv {

/// Read-only strided view over a path; binds both contiguous vectors and
/// the nested subsamples returned below without copying.
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd, 0, Eigen::InnerStride<>>;
using StridedView = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>>;

/// Coefficients active from `start` (years) until the next piece begins.
struct CoefficientPiece
{
  double start = 0.0;
  double mu = 0.0;
  double sigma = 0.2;

  bool operator==(const CoefficientPiece&) const = default;
};

/// Latent log price dX = mu dt + sigma dB.
///
/// With an empty `schedule` the coefficients are the constants `mu` and `sigma`.
/// A non-empty schedule makes them deterministic and piecewise constant in time;
/// the first piece must start at 0 and starts must increase strictly.
struct ProcessModel
{
  double mu = 0.0;
  double sigma = 0.2;
  double x0 = 0.0;
  std::vector<CoefficientPiece> schedule;

  bool constant_coefficients() const noexcept { return schedule.empty(); }
  double mu_at(double t) const;
  double sigma_at(double t) const;
  /// Exact integrals of mu and sigma^2 over [a, b].
  double integrated_drift(double a, double b) const;
  double integrated_variance(double a, double b) const;
  /// Largest sigma over the whole time axis.
  double max_sigma() const;
  /// Throws ModelError when an invariant fails.
  void validate() const;

  bool operator==(const ProcessModel&) const = default;
};

struct SamplingGrid
{
  Eigen::Index n = 23400;
  double horizon = 1.0 / 252.0;

  double dt() const noexcept { return horizon / static_cast<double>(n); }
  double time(Eigen::Index i) const noexcept { return horizon * static_cast<double>(i) / static_cast<double>(n); }
  void validate() const;

  bool operator==(const SamplingGrid&) const = default;
};

/// Latent path on a grid `refine` times finer than the observation grid.
class MasterPath
{
public:
  MasterPath(ProcessModel model, SamplingGrid grid, Eigen::Index refine, Eigen::VectorXd values,
             std::uint64_t seed = 0, std::uint64_t stream = 0);

  const ProcessModel& model() const noexcept { return model_; }
  const SamplingGrid& grid() const noexcept { return grid_; }
  Eigen::Index refine() const noexcept { return refine_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  Eigen::Index fine_steps() const noexcept { return values_.size() - 1; }
  double fine_dt() const noexcept { return grid_.horizon / static_cast<double>(fine_steps()); }
  double fine_time(Eigen::Index j) const noexcept
  {
    return grid_.horizon * static_cast<double>(j) / static_cast<double>(fine_steps());
  }

private:
  ProcessModel model_;
  SamplingGrid grid_;
  Eigen::Index refine_;
  Eigen::VectorXd values_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Exact Gaussian increments on the r*n fine grid; stream selects the replication.
MasterPath generate_master_path(const ProcessModel& model, const SamplingGrid& grid, Eigen::Index refine,
                                std::uint64_t seed, std::uint64_t stream);

/// Values at the observation times t_0..t_n (every `refine`-th master value).
StridedView observation_values(const MasterPath& path);

/// Values on the nested grid with n_coarse intervals; n_coarse must divide n.
StridedView subsample_nested(const MasterPath& path, Eigen::Index n_coarse);

/// Default refinement for a kernel of width gamma: max(10, ceil(16 sigma^2 dt / gamma^2)).
/// gamma <= 0 means no smooth kernel is under study and yields 10.
Eigen::Index default_refine(const ProcessModel& model, const SamplingGrid& grid, double gamma);

/// Smallest refine with max_sigma * sqrt(fine dt) <= gamma / 4.
Eigen::Index required_refine(const ProcessModel& model, const SamplingGrid& grid, double gamma);

} // namespace tsrv
