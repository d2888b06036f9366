#include "tsrvlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsrvlab/error.hpp"
#include "tsrvlab/rng.hpp"

namespace tsrv {

namespace {

// Index of the piece active at time t.
std::size_t piece_at(const std::vector<CoefficientPiece>& schedule, double t)
{
  auto it = std::upper_bound(schedule.begin(), schedule.end(), t,
                             [](double value, const CoefficientPiece& p) { return value < p.start; });
  return it == schedule.begin() ? 0 : static_cast<std::size_t>(it - schedule.begin() - 1);
}

template <typename Fn>
double integrate_pieces(const std::vector<CoefficientPiece>& schedule, double a, double b, Fn value)
{
  double total = 0.0;
  for (std::size_t i = piece_at(schedule, a); i < schedule.size(); ++i) {
    const double lo = std::max(a, schedule[i].start);
    const double hi = i + 1 < schedule.size() ? std::min(b, schedule[i + 1].start) : b;
    if (lo >= b) {
      break;
    }
    if (hi > lo) {
      total += value(schedule[i]) * (hi - lo);
    }
  }
  return total;
}

} // namespace

double ProcessModel::mu_at(double t) const
{
  return schedule.empty() ? mu : schedule[piece_at(schedule, t)].mu;
}

double ProcessModel::sigma_at(double t) const
{
  return schedule.empty() ? sigma : schedule[piece_at(schedule, t)].sigma;
}

double ProcessModel::integrated_drift(double a, double b) const
{
  if (schedule.empty()) {
    return mu * (b - a);
  }
  return integrate_pieces(schedule, a, b, [](const CoefficientPiece& p) { return p.mu; });
}

double ProcessModel::integrated_variance(double a, double b) const
{
  if (schedule.empty()) {
    return sigma * sigma * (b - a);
  }
  return integrate_pieces(schedule, a, b, [](const CoefficientPiece& p) { return p.sigma * p.sigma; });
}

double ProcessModel::max_sigma() const
{
  if (schedule.empty()) {
    return sigma;
  }
  double best = 0.0;
  for (const auto& p : schedule) {
    best = std::max(best, p.sigma);
  }
  return best;
}

void ProcessModel::validate() const
{
  if (!std::isfinite(x0)) {
    throw ModelError("x0 must be finite");
  }
  if (schedule.empty()) {
    if (!std::isfinite(mu) || !std::isfinite(sigma)) {
      throw ModelError("mu and sigma must be finite");
    }
    if (!(sigma > 0.0)) {
      throw ModelError("sigma must be positive, got " + std::to_string(sigma));
    }
    return;
  }
  if (schedule.front().start != 0.0) {
    throw ModelError("coefficient schedule must start at t = 0");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& p = schedule[i];
    if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.start)) {
      throw ModelError("coefficient piece " + std::to_string(i) + " is not finite");
    }
    if (!(p.sigma > 0.0)) {
      throw ModelError("sigma must be positive in piece " + std::to_string(i));
    }
    if (i > 0 && !(p.start > schedule[i - 1].start)) {
      throw ModelError("coefficient piece starts must increase strictly");
    }
  }
}

void SamplingGrid::validate() const
{
  if (n < 2) {
    throw DomainError("sampling grid needs n >= 2, got " + std::to_string(n));
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("sampling horizon T must be positive and finite");
  }
}

MasterPath::MasterPath(ProcessModel model, SamplingGrid grid, Eigen::Index refine, Eigen::VectorXd values,
                       std::uint64_t seed, std::uint64_t stream)
    : model_(std::move(model)), grid_(grid), refine_(refine), values_(std::move(values)), seed_(seed),
      stream_(stream)
{
  grid_.validate();
  if (refine_ < 1) {
    throw DomainError("refine must be >= 1");
  }
  if (values_.size() != refine_ * grid_.n + 1) {
    throw DomainError("master path needs refine*n+1 values, got " + std::to_string(values_.size()));
  }
}

MasterPath generate_master_path(const ProcessModel& model, const SamplingGrid& grid, Eigen::Index refine,
                                std::uint64_t seed, std::uint64_t stream)
{
  model.validate();
  grid.validate();
  if (refine < 1) {
    throw DomainError("refine must be >= 1, got " + std::to_string(refine));
  }
  constexpr Eigen::Index kMax = std::numeric_limits<Eigen::Index>::max();
  if (grid.n > (kMax - 1) / refine) {
    throw CapacityError("refine * n overflows the index range");
  }
  const Eigen::Index steps = refine * grid.n;

  Eigen::VectorXd values(steps + 1);
  values[0] = model.x0;
  CounterRng rng(seed, stream, RngDomain::LatentPath);

  const double ds = grid.horizon / static_cast<double>(steps);
  if (model.constant_coefficients()) {
    const double drift = model.mu * ds;
    const double scale = model.sigma * std::sqrt(ds);
    double x = model.x0;
    for (Eigen::Index j = 1; j <= steps; ++j) {
      x += drift + scale * rng.normal();
      values[j] = x;
    }
  } else {
    double x = model.x0;
    for (Eigen::Index j = 1; j <= steps; ++j) {
      const double a = grid.horizon * static_cast<double>(j - 1) / static_cast<double>(steps);
      const double b = grid.horizon * static_cast<double>(j) / static_cast<double>(steps);
      x += model.integrated_drift(a, b) + std::sqrt(model.integrated_variance(a, b)) * rng.normal();
      values[j] = x;
    }
  }
  return MasterPath(model, grid, refine, std::move(values), seed, stream);
}

StridedView observation_values(const MasterPath& path)
{
  return StridedView(path.values().data(), path.grid().n + 1, Eigen::InnerStride<>(path.refine()));
}

StridedView subsample_nested(const MasterPath& path, Eigen::Index n_coarse)
{
  const Eigen::Index n = path.grid().n;
  if (n_coarse < 1 || n % n_coarse != 0) {
    throw DomainError("n_coarse = " + std::to_string(n_coarse) + " does not divide n = " + std::to_string(n));
  }
  const Eigen::Index stride = (n / n_coarse) * path.refine();
  return StridedView(path.values().data(), n_coarse + 1, Eigen::InnerStride<>(stride));
}

Eigen::Index required_refine(const ProcessModel& model, const SamplingGrid& grid, double gamma)
{
  if (!(gamma > 0.0)) {
    return 1;
  }
  const double sigma = model.max_sigma();
  const double needed = std::ceil(16.0 * sigma * sigma * grid.dt() / (gamma * gamma) - 1e-12);
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(needed));
}

Eigen::Index default_refine(const ProcessModel& model, const SamplingGrid& grid, double gamma)
{
  return std::max<Eigen::Index>(10, required_refine(model, grid, gamma));
}

} // namespace tsrv
