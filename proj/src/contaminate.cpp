#include "tsrvlab/contaminate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "tsrvlab/error.hpp"

namespace tsrv {

namespace {

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kTieSlack = 1e-9;

void require_positive(double value, const char* name)
{
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string("kernel parameter ") + name + " must be positive and finite");
  }
}

// Tick count of the observation: at least one tick.
std::int64_t observed_tick(double log_price, double alpha)
{
  const double price = std::exp(log_price);
  if (!std::isfinite(price)) {
    throw DomainError("latent price overflows double precision");
  }
  return std::max<std::int64_t>(1, nearest_tick(price, alpha));
}

} // namespace

void validate(const ContaminationKernel& kernel)
{
  std::visit(Overloaded{
                 [](const AdditiveGaussian& k) { require_positive(k.gamma, "gamma"); },
                 [](const PureRounding& k) { require_positive(k.alpha, "alpha"); },
                 [](const NoiseThenRound& k) {
                   require_positive(k.gamma, "gamma");
                   require_positive(k.alpha, "alpha");
                 },
             },
             kernel);
}

std::string describe(const ContaminationKernel& kernel)
{
  char buf[128];
  std::visit(Overloaded{
                 [&](const AdditiveGaussian& k) { std::snprintf(buf, sizeof buf, "additive(gamma=%.17g)", k.gamma); },
                 [&](const PureRounding& k) { std::snprintf(buf, sizeof buf, "rounding(alpha=%.17g)", k.alpha); },
                 [&](const NoiseThenRound& k) {
                   std::snprintf(buf, sizeof buf, "noise_round(gamma=%.17g,alpha=%.17g)", k.gamma, k.alpha);
                 },
             },
             kernel);
  return buf;
}

double kernel_gamma(const ContaminationKernel& kernel) noexcept
{
  return std::visit(Overloaded{
                        [](const AdditiveGaussian& k) { return k.gamma; },
                        [](const PureRounding&) { return 0.0; },
                        [](const NoiseThenRound& k) { return k.gamma; },
                    },
                    kernel);
}

std::optional<double> kernel_alpha(const ContaminationKernel& kernel) noexcept
{
  return std::visit(Overloaded{
                        [](const AdditiveGaussian&) -> std::optional<double> { return std::nullopt; },
                        [](const PureRounding& k) -> std::optional<double> { return k.alpha; },
                        [](const NoiseThenRound& k) -> std::optional<double> { return k.alpha; },
                    },
                    kernel);
}

std::int64_t nearest_tick(double s, double alpha)
{
  if (!(s >= 0.0)) {
    throw DomainError("round_price: price must be non-negative");
  }
  require_positive(alpha, "alpha");
  const double q = s / alpha;
  // Decimal ticks make exact half-ticks land a few ulps short of .5 (0.015 / 0.01).
  const double t = std::floor(q + 0.5 + kTieSlack * std::max(1.0, q));
  if (!(t < static_cast<double>(std::numeric_limits<std::int64_t>::max()))) {
    throw DomainError("round_price: price is too large for the tick grid");
  }
  return static_cast<std::int64_t>(t);
}

double round_price(double s, double alpha)
{
  return alpha * static_cast<double>(nearest_tick(s, alpha));
}

double observe_with_noise(const ContaminationKernel& kernel, double x, double eta)
{
  return std::visit(Overloaded{
                        [&](const AdditiveGaussian&) { return x + eta; },
                        [&](const PureRounding& k) {
                          return std::log(static_cast<double>(observed_tick(x, k.alpha)) * k.alpha);
                        },
                        [&](const NoiseThenRound& k) {
                          return std::log(static_cast<double>(observed_tick(x + eta, k.alpha)) * k.alpha);
                        },
                    },
                    kernel);
}

double observe_one(const ContaminationKernel& kernel, double x, CounterRng& rng)
{
  if (std::holds_alternative<PureRounding>(kernel)) {
    return observe_with_noise(kernel, x, 0.0);
  }
  return observe_with_noise(kernel, x, kernel_gamma(kernel) * rng.normal());
}

ObservedSeries contaminate_series(const ContaminationKernel& kernel, const ConstVectorRef& latent,
                                  std::uint64_t seed, std::uint64_t stream)
{
  validate(kernel);
  if (latent.size() == 0) {
    throw DomainError("contaminate_series: latent series is empty");
  }
  ObservedSeries out{Eigen::VectorXd(latent.size()), {}, kernel, seed, stream};
  CounterRng rng(seed, stream, RngDomain::Contamination);
  const Eigen::Index n = latent.size();

  if (const auto* k = std::get_if<AdditiveGaussian>(&kernel)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out.y[i] = latent[i] + k->gamma * rng.normal();
    }
    return out;
  }

  const double alpha = *kernel_alpha(kernel);
  const double gamma = kernel_gamma(kernel);
  out.ticks.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = gamma > 0.0 ? gamma * rng.normal() : 0.0;
    const std::int64_t tick = observed_tick(latent[i] + eta, alpha);
    out.ticks[static_cast<std::size_t>(i)] = tick;
    out.y[i] = std::log(static_cast<double>(tick) * alpha);
  }
  return out;
}

} // namespace tsrv
