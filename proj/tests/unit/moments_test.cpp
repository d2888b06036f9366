#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tsrvlab/contaminate.hpp"
#include "tsrvlab/error.hpp"
#include "tsrvlab/localtime.hpp"
#include "tsrvlab/moments.hpp"
#include "tsrvlab/rng.hpp"
#include "tsrvlab/simulate.hpp"

using namespace tsrv;

namespace {

constexpr double kAlpha = 0.01;
const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// f and g straight from the cell sum, over every cell up to k_max.
std::pair<double, double> brute_force_f_g(double x, double gamma, double alpha, long k_max)
{
  double p_prev = Phi((std::log(alpha / 2) - x) / gamma);
  double m1 = std::log(alpha) * p_prev;
  double m2 = std::log(alpha) * std::log(alpha) * p_prev;
  for (long k = 1; k <= k_max; ++k) {
    const double p = Phi((std::log((k + 0.5) * alpha) - x) / gamma) - Phi((std::log((k - 0.5) * alpha) - x) / gamma);
    const double y = std::log(k * alpha);
    m1 += y * p;
    m2 += y * y * p;
  }
  return {m1, std::max(0.0, m2 - m1 * m1)};
}

TEST(Bands, ConcentratedAtTickCentre)
{
  const long k = 100;
  const double width = std::log((k + 0.5) / (k - 0.5));
  const auto b = band_probabilities(std::log(k * kAlpha), width / 10, kAlpha);
  EXPECT_GE(b.band(k), 0.999);
}

TEST(Bands, SymmetricAtEdge)
{
  const long k = 100;
  const auto b = band_probabilities(std::log((k + 0.5) * kAlpha), 1e-6, kAlpha);
  EXPECT_NEAR(b.band(k), 0.5, 1e-6);
  EXPECT_NEAR(b.band(k + 1), 0.5, 1e-6);
}

TEST(Bands, Normalization)
{
  CounterRng r(1, 0, RngDomain::Test);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::log(0.002 + 3.0 * r.uniform());
    const double gamma = std::exp(std::log(1e-6) + r.uniform() * std::log(0.5 / 1e-6));
    const auto b = band_probabilities(x, gamma, kAlpha);
    double s = b.p_floor;
    for (double p : b.p) {
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
      s += p;
    }
    ASSERT_LE(std::abs(1.0 - (s + b.tail)), 1e-12);
    ASSERT_LE(b.tail, 1e-12);
    ASSERT_GE(s, 1.0 - 1e-12);
    ASSERT_LE(s, 1.0 + 1e-12);
    ASSERT_NEAR(b.total(), s, 1e-14);
  }
}

TEST(Bands, ZeroGammaRejected)
{
  EXPECT_THROW(band_probabilities(0.0, 0.0, kAlpha), DomainError);
}

TEST(Bands, FloorCell)
{
  const auto b = band_probabilities(std::log(0.001), 0.1, kAlpha);
  EXPECT_GT(b.p_floor, 0.99);
}

TEST(FBar, Examples)
{
  EXPECT_EQ(f_bar(AdditiveGaussian{0.004}, 3.7), 3.7);
  EXPECT_DOUBLE_EQ(f_bar(PureRounding{kAlpha}, std::log(1.234)), std::log(1.23));
  EXPECT_DOUBLE_EQ(f_bar(PureRounding{kAlpha}, std::log(0.001)), std::log(kAlpha));
}

TEST(FBar, MatchesCellSum)
{
  CounterRng r(2, 0, RngDomain::Test);
  for (int i = 0; i < 200; ++i) {
    const double x = std::log(0.005 + 1.5 * r.uniform());
    const double gamma = 0.0005 + 0.05 * r.uniform();
    const auto [f, g] = brute_force_f_g(x, gamma, kAlpha, 800);
    const NoiseThenRound k{gamma, kAlpha};
    EXPECT_NEAR(f_bar(k, x), f, 1e-12);
    EXPECT_NEAR(g_var(k, x), g, 1e-12);
  }
}

TEST(FBar, NoiseThenRoundMonteCarlo)
{
  const NoiseThenRound k{0.005, kAlpha};
  const int N = 1000000;
  CounterRng r(31, 0, RngDomain::Test);
  double s1 = 0, s2 = 0;
  std::vector<double> y(N);
  for (int i = 0; i < N; ++i) {
    y[i] = observe_one(k, 0.0, r);
    s1 += y[i];
  }
  const double m = s1 / N;
  double m4 = 0;
  for (double v : y) {
    const double d = (v - m) * (v - m);
    s2 += d;
    m4 += d * d;
  }
  const double var = s2 / (N - 1);
  m4 /= N;
  EXPECT_LE(std::abs(m - f_bar(k, 0.0)), 3.0 * std::sqrt(var / N));
  EXPECT_LE(std::abs(var - g_var(k, 0.0)), 3.0 * std::sqrt((m4 - var * var) / N));
}

TEST(FPrime, Additive)
{
  EXPECT_EQ(f_prime(AdditiveGaussian{0.01}, -2.0), 1.0);
  EXPECT_EQ(f_prime(AdditiveGaussian{0.01}, 5.0), 1.0);
}

TEST(FPrime, PureRoundingUnsupported)
{
  EXPECT_THROW(f_prime(PureRounding{kAlpha}, 0.0), UnsupportedError);
  EXPECT_TRUE(std::isnan(point_moments(PureRounding{kAlpha}, 0.0).f_prime));
}

TEST(FPrime, FiniteDifferenceAtExample)
{
  const NoiseThenRound k{0.002, kAlpha};
  const double x = std::log(1.003);
  const double h = 1e-7;
  const double fd = (f_bar(k, x + h) - f_bar(k, x - h)) / (2 * h);
  EXPECT_NEAR(f_prime(k, x) / fd, 1.0, 1e-6);
}

TEST(FPrime, FiniteDifferenceRandom)
{
  CounterRng r(3, 0, RngDomain::Test);
  for (int i = 0; i < 100; ++i) {
    const double p = 0.5 + 4.5 * r.uniform();
    const double gamma = (0.3 + 2.7 * r.uniform()) * kAlpha / p;
    const double x = std::log(p);
    const double h = 1e-3 * gamma;
    const NoiseThenRound k{gamma, kAlpha};
    const double fd = (f_bar(k, x + h) - f_bar(k, x - h)) / (2 * h);
    EXPECT_NEAR(f_prime(k, x) / fd, 1.0, 1e-5) << "p=" << p << " gamma=" << gamma;
  }
}

TEST(FPrime, Positive)
{
  CounterRng r(4, 0, RngDomain::Test);
  for (int i = 0; i < 2000; ++i) {
    // Far below a tenth of a cell width the density underflows between edges.
    const double p = 0.02 + 2.0 * r.uniform();
    const double gamma = (0.1 + 2.9 * r.uniform()) * kAlpha / p;
    const double x = std::log(p);
    EXPECT_GT(f_prime(NoiseThenRound{gamma, kAlpha}, x), 0.0);
  }
}

TEST(FPrime, SmallGammaLimitAtEdge)
{
  const double gamma = 1e-5;
  const long k = 100;
  const double xk = std::log((k + 0.5) * kAlpha);
  const double expected = inv_sqrt_2pi * std::log(101.0 / 100.0);
  EXPECT_NEAR(expected, 3.9696e-3, 1e-7);
  EXPECT_NEAR(gamma * f_prime(NoiseThenRound{gamma, kAlpha}, xk) / expected, 1.0, 1e-3);
}

TEST(FPrime, SmallGammaLimitAroundEdge)
{
  const long k = 100;
  const double xk = std::log((k + 0.5) * kAlpha);
  for (double y : {-1.0, 0.0, 1.0}) {
    const double limit = inv_sqrt_2pi * std::exp(-0.5 * y * y) * std::log((k + 1.0) / k);
    for (double gamma : {1e-5, 1e-6, 1e-7}) {
      const double v = gamma * f_prime(NoiseThenRound{gamma, kAlpha}, xk + y * gamma);
      EXPECT_NEAR(v / limit, 1.0, 1e-3) << "y=" << y << " gamma=" << gamma;
    }
  }
}

TEST(FBar, LargeGammaCloseToLatent)
{
  for (double gamma : {5 * kAlpha, 10 * kAlpha}) {
    const NoiseThenRound k{gamma, kAlpha};
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = std::log(0.95 + 0.1 * i / 400.0);
      worst = std::max(worst, std::abs(f_bar(k, x) - x));
    }
    EXPECT_LE(worst, 0.02 * gamma);
  }
}

TEST(GVar, Examples)
{
  EXPECT_EQ(g_var(AdditiveGaussian{3e-4}, 1.0), 3e-4 * 3e-4);
  EXPECT_EQ(g_var(PureRounding{kAlpha}, 0.123), 0.0);
  for (double x : {-1.0, 0.0, 0.004, std::log(1.005)})
    EXPECT_GE(g_var(NoiseThenRound{1e-4, kAlpha}, x), 0.0);
}

TEST(Profile, MatchesPointwise)
{
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(50, -0.02, 0.02);
  const NoiseThenRound k{0.003, kAlpha};
  const auto prof = moment_profile(k, x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_DOUBLE_EQ(prof.f[i], f_bar(k, x[i]));
    EXPECT_DOUBLE_EQ(prof.f_prime[i], f_prime(k, x[i]));
    EXPECT_DOUBLE_EQ(prof.g[i], g_var(k, x[i]));
  }
}

const ProcessModel model{0.0, 0.2, 0.0, {}};
const SamplingGrid grid{23400, 1.0 / 252};

TEST(Targets, AdditiveClosedForms)
{
  const auto path = generate_master_path(model, grid, 10, 1, 0);
  const AdditiveGaussian k{0.0005};
  const double T = grid.horizon;
  EXPECT_NEAR(qv_target(k, path) / (0.04 * T), 1.0, 1e-12);
  EXPECT_NEAR(xi_squared(k, path) / (4.0 / 3.0 * 0.0016 * T), 1.0, 1e-12);
  EXPECT_NEAR(xi_squared(k, path), 8.4656e-6, 8.4656e-6 * 1e-4);
  const double closed = 8 * std::pow(0.0005, 4) + (4.0 / 3.0) * 0.0016 * T * T;
  EXPECT_NEAR(avar_thm1(k, path, 1.0) / closed, 1.0, 1e-12);
  EXPECT_NEAR(avar_thm1(k, path, 1.0), 3.36e-8, 3.36e-8 * 1e-3);
}

TEST(Targets, CScaling)
{
  const auto path = generate_master_path(model, grid, 10, 1, 0);
  const AdditiveGaussian k{0.01};
  const auto t = path_targets(k, path);
  const double T = grid.horizon;
  const double a1 = avar_from_targets(t, T, 1.0);
  const double a2 = avar_from_targets(t, T, 2.0);
  const double term1 = 8.0 / T * t.g_squared_integral;
  const double term2 = t.xi_squared * T;
  EXPECT_NEAR(a1, term1 + term2, 1e-20);
  EXPECT_NEAR(a2, term1 / 4 + 2 * term2, 1e-20);
}

TEST(Targets, PureRoundingUnsupported)
{
  const auto path = generate_master_path(model, {100, 1.0 / 252}, 1, 1, 0);
  EXPECT_THROW(qv_target(PureRounding{kAlpha}, path), UnsupportedError);
  EXPECT_THROW(xi_squared(PureRounding{kAlpha}, path), UnsupportedError);
}

TEST(Targets, RefineDoublingStable)
{
  const NoiseThenRound k{0.005, kAlpha};
  const auto fine = generate_master_path(model, grid, 20, 5, 0);
  Eigen::VectorXd half = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(
      fine.values().data(), fine.values().size() / 2 + 1);
  const MasterPath coarse(model, grid, 10, half);
  const auto a = path_targets(k, coarse);
  const auto b = path_targets(k, fine);
  EXPECT_NEAR(a.qv / b.qv, 1.0, 0.01);
  EXPECT_NEAR(a.xi_squared / b.xi_squared, 1.0, 0.01);
  EXPECT_NEAR(a.g_squared_integral / b.g_squared_integral, 1.0, 0.01);
}

// Occupation formula: gamma * <f(X), f(X)>_T is the local time profile smoothed
// by N(0, gamma^2 / 2) around each edge, weighted by log((k+1)/k)^2 / (2 sqrt(pi)).
TEST(Targets, SmallGammaMatchesSmoothedLocalTime)
{
  const double gamma = 2e-4;
  const auto path = generate_master_path(model, grid, default_refine(model, grid, gamma), 2007, 0);
  const auto prof = local_time_profile(path, kAlpha, LocalTimeMethod::Tanaka);
  const double sd = gamma / std::sqrt(2.0);
  double oracle = 0.0;
  for (std::int64_t k = prof.k_lo; k <= prof.k_hi; ++k) {
    const double edge = std::log((k + 0.5) * kAlpha);
    const double w = std::pow(std::log((k + 1.0) / k), 2) / (2.0 * std::sqrt(std::numbers::pi));
    double acc = 0.0, norm = 0.0;
    for (int j = -40; j <= 40; ++j) {
      const double u = 0.1 * j * sd;
      const double kern = std::exp(-0.5 * (0.1 * j) * (0.1 * j));
      acc += kern * tanaka_local_time(path.values(), edge + u);
      norm += kern;
    }
    oracle += w * acc / norm;
  }
  ASSERT_GT(oracle, 0.0);
  const double scaled = gamma * qv_target(NoiseThenRound{gamma, kAlpha}, path);
  EXPECT_NEAR(scaled / oracle, 1.0, 0.03);
}

TEST(Targets, BlowUpAsGammaShrinks)
{
  const auto path = generate_master_path(model, grid, 44, 2007, 0);
  const auto prof = local_time_profile(path, kAlpha, LocalTimeMethod::Tanaka);
  const double limit = thm2_limit(prof);
  double prev = 0.0;
  for (double gamma : {2e-3, 5e-4, 2e-4, 5e-5}) {
    const double q = qv_target(NoiseThenRound{gamma, kAlpha}, path);
    EXPECT_GT(q, prev);
    EXPECT_GT(gamma * q / limit, 0.5);
    EXPECT_LT(gamma * q / limit, 2.0);
    prev = q;
  }
}

TEST(Targets, ScheduleUsesLeftPointSigma)
{
  ProcessModel m;
  m.schedule = {{0.0, 0.0, 0.1}, {0.5 / 252, 0.0, 0.3}};
  const SamplingGrid g{100, 1.0 / 252};
  const auto path = generate_master_path(m, g, 2, 3, 0);
  EXPECT_NEAR(qv_target(AdditiveGaussian{0.001}, path) / m.integrated_variance(0, g.horizon), 1.0, 1e-12);
}

} // namespace
