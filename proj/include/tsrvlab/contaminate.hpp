#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tsrvlab/rng.hpp"
#include "tsrvlab/simulate.hpp"

namespace tsrv {

/// Y = X + eta, eta ~ N(0, gamma^2).
struct AdditiveGaussian
{
  double gamma = 0.0005;
};

/// Y = log(alpha v round(exp(X))), no random error.
struct PureRounding
{
  double alpha = 0.01;
};

/// Y = log(alpha v round(exp(X + eta))), eta ~ N(0, gamma^2).
struct NoiseThenRound
{
  double gamma = 0.005;
  double alpha = 0.01;
};

/// Markov kernel Q(x, dy): the conditional law of Y given X = x.
using ContaminationKernel = std::variant<AdditiveGaussian, PureRounding, NoiseThenRound>;

/// Throws DomainError unless every declared parameter is positive and finite.
void validate(const ContaminationKernel& kernel);

/// Short human readable descriptor, e.g. "noise_round(gamma=0.005,alpha=0.01)".
std::string describe(const ContaminationKernel& kernel);

/// Random-error scale; 0 for PureRounding.
double kernel_gamma(const ContaminationKernel& kernel) noexcept;
/// Tick size; nullopt for AdditiveGaussian.
std::optional<double> kernel_alpha(const ContaminationKernel& kernel) noexcept;

/// Nearest tick count to s / alpha with ties (to within 1e-9 relative) rounded up.
std::int64_t nearest_tick(double s, double alpha);

/// alpha * [s / alpha]; ties at half a tick round up.
double round_price(double s, double alpha);

/// Observed log price given latent x and a realised random error eta.
/// eta is ignored by PureRounding.
double observe_with_noise(const ContaminationKernel& kernel, double x, double eta);

/// One draw from Q(x, .). Consumes one normal from `rng` unless the kernel is PureRounding.
double observe_one(const ContaminationKernel& kernel, double x, CounterRng& rng);

struct ObservedSeries
{
  Eigen::VectorXd y;
  /// Integer tick counts backing `y` for rounding kernels; y[i] == log(ticks[i] * alpha).
  std::vector<std::int64_t> ticks;
  ContaminationKernel kernel;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Draws every Y_i independently given the latent values.
ObservedSeries contaminate_series(const ContaminationKernel& kernel, const ConstVectorRef& latent,
                                  std::uint64_t seed, std::uint64_t stream);

} // namespace tsrv
