#include "tsrvlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsrvlab/error.hpp"
#include "tsrvlab/normal.hpp"

namespace tsrv {

namespace {

constexpr double kDefaultTol = 1e-12;
constexpr std::int64_t kMaxBands = 10'000'000;

// Half-width of the included range in units of gamma.
double half_width_for(double tol)
{
  double z = 8.0;
  while (2.0 * normal_sf(z) > tol && z < 38.0) {
    z += 0.5;
  }
  return z;
}

// Cell index holding log-noisy value z (0 is the floor cell).
std::int64_t cell_of(double z, double alpha)
{
  const double price = std::exp(z);
  const double q = price / alpha + 0.5;
  if (!(q < 9.0e18)) {
    throw CapacityError("band index overflows: log price too large for the tick grid");
  }
  return static_cast<std::int64_t>(std::floor(q));
}

struct Kahan
{
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) noexcept
  {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

// Evaluates the noise-then-round band series, caching edge logarithms across calls.
class BandSeries
{
public:
  BandSeries(double gamma, double alpha, double tol)
      : gamma_(gamma), alpha_(alpha), half_width_(half_width_for(tol)), log_alpha_(std::log(alpha)),
        log_half_alpha_(std::log(0.5 * alpha))
  {
  }

  PointMoments evaluate(double x)
  {
    const std::int64_t k_lo = std::max<std::int64_t>(1, cell_of(x - half_width_ * gamma_, alpha_));
    const std::int64_t k_hi = std::max(k_lo, cell_of(x + half_width_ * gamma_, alpha_));
    if (k_hi - k_lo > kMaxBands) {
      throw CapacityError("band series: too many rounding cells in range");
    }
    ensure(k_lo - 1, k_hi);
    const double inv_gamma = 1.0 / gamma_;

    // Pass 1: cell probabilities and the mean.
    const double p_floor = normal_cdf((log_half_alpha_ - x) * inv_gamma);
    double lower = k_lo == 1 ? p_floor : normal_cdf((edge(k_lo - 1) - x) * inv_gamma);
    probs_.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
    double mean = log_alpha_ * p_floor;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const double u = (edge(k) - x) * inv_gamma;
      const double upper = normal_cdf(u);
      const double p = upper - lower;
      probs_[static_cast<std::size_t>(k - k_lo)] = p;
      mean += center(k) * p;
      lower = upper;
    }

    // Pass 2: centred second moment, and the derivative from the jumps at each edge.
    double var = p_floor * (log_alpha_ - mean) * (log_alpha_ - mean);
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const double d = center(k) - mean;
      var += probs_[static_cast<std::size_t>(k - k_lo)] * d * d;
    }
    double slope = 0.0;
    for (std::int64_t j = std::max<std::int64_t>(1, k_lo - 1); j <= k_hi; ++j) {
      slope += normal_pdf((edge(j) - x) * inv_gamma) * jump(j);
    }
    return {mean, slope * inv_gamma, std::max(0.0, var)};
  }

  BandDecomposition decompose(double x)
  {
    BandDecomposition out;
    out.x = x;
    out.gamma = gamma_;
    out.alpha = alpha_;
    out.k_lo = std::max<std::int64_t>(1, cell_of(x - half_width_ * gamma_, alpha_));
    out.k_hi = std::max(out.k_lo, cell_of(x + half_width_ * gamma_, alpha_));
    if (out.k_hi - out.k_lo > kMaxBands) {
      throw CapacityError("band series: too many rounding cells in range");
    }
    ensure(out.k_lo - 1, out.k_hi);
    out.p_floor = normal_cdf((log_half_alpha_ - x) / gamma_);
    out.p.reserve(static_cast<std::size_t>(out.k_hi - out.k_lo + 1));
    for (std::int64_t k = out.k_lo; k <= out.k_hi; ++k) {
      const double lo = (edge(k - 1) - x) / gamma_;
      const double hi = (edge(k) - x) / gamma_;
      // Difference taken on the side of the mean where both terms are small.
      const double p = lo >= 0.0 ? normal_sf(lo) - normal_sf(hi) : normal_cdf(hi) - normal_cdf(lo);
      out.p.push_back(p);
    }
    const double below = out.k_lo > 1 ? normal_cdf((edge(out.k_lo - 1) - x) / gamma_) - out.p_floor : 0.0;
    out.tail = below + normal_sf((edge(out.k_hi) - x) / gamma_);
    return out;
  }

private:
  // log((j + 1/2) alpha), the boundary between cells j and j + 1.
  double edge(std::int64_t j) const noexcept { return edges_[static_cast<std::size_t>(j - first_)]; }
  // log(j alpha)
  double center(std::int64_t j) const noexcept { return centers_[static_cast<std::size_t>(j - first_)]; }
  // log((j + 1) / j), the jump of the observation at edge j.
  double jump(std::int64_t j) const noexcept { return jumps_[static_cast<std::size_t>(j - first_)]; }

  void ensure(std::int64_t lo, std::int64_t hi)
  {
    if (!edges_.empty() && lo >= first_ && hi < first_ + static_cast<std::int64_t>(edges_.size())) {
      return;
    }
    const std::int64_t new_first = edges_.empty() ? lo : std::min(first_, lo);
    const std::int64_t new_last =
        edges_.empty() ? hi : std::max(first_ + static_cast<std::int64_t>(edges_.size()) - 1, hi);
    first_ = new_first;
    const auto count = static_cast<std::size_t>(new_last - new_first + 1);
    edges_.resize(count);
    centers_.resize(count);
    jumps_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = static_cast<double>(new_first + static_cast<std::int64_t>(i));
      edges_[i] = std::log((j + 0.5) * alpha_);
      centers_[i] = j >= 1.0 ? std::log(j * alpha_) : log_alpha_;
      jumps_[i] = j >= 1.0 ? std::log1p(1.0 / j) : 0.0;
    }
  }

  double gamma_;
  double alpha_;
  double half_width_;
  double log_alpha_;
  double log_half_alpha_;
  std::int64_t first_ = 0;
  std::vector<double> edges_;
  std::vector<double> centers_;
  std::vector<double> jumps_;
  std::vector<double> probs_;
};

double pure_rounding_f(double alpha, double x)
{
  const double price = std::exp(x);
  return std::log(static_cast<double>(std::max<std::int64_t>(1, nearest_tick(price, alpha))) * alpha);
}

// Sweeps `values`, calling sink(i, moments) for each.
template <typename Sink>
void sweep_moments(const ContaminationKernel& kernel, const ConstVectorRef& values, Sink&& sink)
{
  validate(kernel);
  const Eigen::Index n = values.size();
  if (const auto* k = std::get_if<AdditiveGaussian>(&kernel)) {
    const double g = k->gamma * k->gamma;
    for (Eigen::Index i = 0; i < n; ++i) {
      sink(i, PointMoments{values[i], 1.0, g});
    }
  } else if (const auto* k = std::get_if<PureRounding>(&kernel)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      sink(i, PointMoments{pure_rounding_f(k->alpha, values[i]), std::numeric_limits<double>::quiet_NaN(), 0.0});
    }
  } else {
    const auto& ntr = std::get<NoiseThenRound>(kernel);
    BandSeries series(ntr.gamma, ntr.alpha, kDefaultTol);
    for (Eigen::Index i = 0; i < n; ++i) {
      sink(i, series.evaluate(values[i]));
    }
  }
}

void require_differentiable(const ContaminationKernel& kernel, const char* what)
{
  if (std::holds_alternative<PureRounding>(kernel)) {
    throw UnsupportedError(std::string(what) + ": pure rounding has no derivative");
  }
}

} // namespace

double BandDecomposition::band(std::int64_t k) const noexcept
{
  if (k < k_lo || k > k_hi) {
    return 0.0;
  }
  return p[static_cast<std::size_t>(k - k_lo)];
}

double BandDecomposition::total() const noexcept
{
  double sum = p_floor + tail;
  for (double v : p) {
    sum += v;
  }
  return sum;
}

BandDecomposition band_probabilities(double x, double gamma, double alpha, double tol)
{
  if (!(gamma > 0.0)) {
    throw DomainError("band_probabilities: gamma must be positive (use the pure rounding path for gamma = 0)");
  }
  if (!(alpha > 0.0) || !(tol > 0.0)) {
    throw DomainError("band_probabilities: alpha and tol must be positive");
  }
  BandSeries series(gamma, alpha, tol);
  return series.decompose(x);
}

PointMoments point_moments(const ContaminationKernel& kernel, double x)
{
  PointMoments out;
  const Eigen::Matrix<double, 1, 1> one(x);
  sweep_moments(kernel, one, [&](Eigen::Index, const PointMoments& m) { out = m; });
  return out;
}

double f_bar(const ContaminationKernel& kernel, double x)
{
  return point_moments(kernel, x).f;
}

double f_prime(const ContaminationKernel& kernel, double x)
{
  require_differentiable(kernel, "f_prime");
  return point_moments(kernel, x).f_prime;
}

double g_var(const ContaminationKernel& kernel, double x)
{
  return point_moments(kernel, x).g;
}

MomentProfile moment_profile(const ContaminationKernel& kernel, const ConstVectorRef& values)
{
  MomentProfile out{Eigen::VectorXd(values.size()), Eigen::VectorXd(values.size()), Eigen::VectorXd(values.size())};
  sweep_moments(kernel, values, [&](Eigen::Index i, const PointMoments& m) {
    out.f[i] = m.f;
    out.f_prime[i] = m.f_prime;
    out.g[i] = m.g;
  });
  return out;
}

PathTargets path_targets(const ContaminationKernel& kernel, const MasterPath& path)
{
  require_differentiable(kernel, "path_targets");
  const Eigen::Index steps = path.fine_steps();
  const double ds = path.fine_dt();
  const ProcessModel& model = path.model();
  const bool constant = model.constant_coefficients();
  const double s2_const = model.sigma * model.sigma;

  Kahan qv, quartic, g2;
  // Left point: the last master value carries no interval.
  const ConstVectorRef left(path.values().head(steps));
  sweep_moments(kernel, left, [&](Eigen::Index j, const PointMoments& m) {
    double s2 = s2_const;
    if (!constant) {
      const double s = model.sigma_at(path.fine_time(j));
      s2 = s * s;
    }
    const double a = m.f_prime * m.f_prime * s2;
    qv.add(a);
    quartic.add(a * a);
    g2.add(m.g * m.g);
  });
  return {qv.value() * ds, (4.0 / 3.0) * quartic.value() * ds, g2.value() * ds};
}

double qv_target(const ContaminationKernel& kernel, const MasterPath& path)
{
  return path_targets(kernel, path).qv;
}

double xi_squared(const ContaminationKernel& kernel, const MasterPath& path)
{
  return path_targets(kernel, path).xi_squared;
}

double avar_from_targets(const PathTargets& targets, double horizon, double c)
{
  if (!(c > 0.0)) {
    throw DomainError("avar: c must be positive");
  }
  return 8.0 / (horizon * c * c) * targets.g_squared_integral + c * targets.xi_squared * horizon;
}

double avar_thm1(const ContaminationKernel& kernel, const MasterPath& path, double c)
{
  return avar_from_targets(path_targets(kernel, path), path.grid().horizon, c);
}

} // namespace tsrv
