#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tsrvlab/error.hpp"
#include "tsrvlab/simulate.hpp"

using namespace tsrv;

namespace {

const ProcessModel base{0.0, 0.2, 0.0, {}};

TEST(MasterPath, StartsAtX0)
{
  const auto p = generate_master_path(base, {4, 1.0 / 252}, 1, 123, 0);
  EXPECT_EQ(p.values().size(), 5);
  EXPECT_EQ(p.values()[0], 0.0);
  ProcessModel m = base;
  m.x0 = std::log(1.37);
  EXPECT_EQ(generate_master_path(m, {4, 1.0}, 3, 1, 0).values()[0], std::log(1.37));
}

TEST(MasterPath, Deterministic)
{
  const SamplingGrid g{100, 1.0 / 252};
  const auto a = generate_master_path(base, g, 7, 99, 5);
  const auto b = generate_master_path(base, g, 7, 99, 5);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_EQ(a.seed(), 99u);
  EXPECT_EQ(a.stream(), 5u);
  EXPECT_NE(a.values(), generate_master_path(base, g, 7, 99, 6).values());
}

TEST(MasterPath, SizeIsRefineTimesNPlusOne)
{
  const auto p = generate_master_path(base, {10, 1.0}, 4, 1, 0);
  EXPECT_EQ(p.values().size(), 41);
  EXPECT_EQ(p.fine_steps(), 40);
  EXPECT_DOUBLE_EQ(p.fine_dt(), 1.0 / 40);
}

TEST(MasterPath, TerminalValueIsGaussian)
{
  ProcessModel m{0.3, 0.2, 0.1, {}};
  const SamplingGrid g{20, 1.0 / 252};
  const int M = 10000;
  std::vector<double> z(M);
  for (int i = 0; i < M; ++i) {
    const auto p = generate_master_path(m, g, 1, 2024, i);
    z[i] = (p.values()[20] - m.x0 - m.mu * g.horizon) / (m.sigma * std::sqrt(g.horizon));
  }
  double s1 = 0, s2 = 0;
  for (double v : z) {
    s1 += v;
  }
  const double mu = s1 / M;
  for (double v : z)
    s2 += (v - mu) * (v - mu);
  const double var = s2 / (M - 1);
  EXPECT_LE(std::abs(mu), 3.0 / std::sqrt(M));
  EXPECT_LE(std::abs(var - 1.0), 5.0 / std::sqrt(M));
}

TEST(MasterPath, VarianceOfTerminalValueMatches)
{
  const SamplingGrid g{50, 1.0 / 252};
  const int M = 10000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < M; ++i) {
    const double x = generate_master_path(base, g, 2, 7, i).values()[100];
    s1 += x;
    s2 += x * x;
  }
  const double var = (s2 - s1 * s1 / M) / (M - 1);
  EXPECT_NEAR(var / (0.04 / 252), 1.0, 0.05);
}

TEST(MasterPath, InvalidModelRejected)
{
  ProcessModel m = base;
  m.sigma = 0.0;
  EXPECT_THROW(generate_master_path(m, {4, 1.0}, 1, 1, 0), ModelError);
  m.sigma = -1.0;
  EXPECT_THROW(generate_master_path(m, {4, 1.0}, 1, 1, 0), ModelError);
  m = base;
  m.mu = std::numeric_limits<double>::infinity();
  EXPECT_THROW(generate_master_path(m, {4, 1.0}, 1, 1, 0), ModelError);
}

TEST(MasterPath, InvalidGridOrRefine)
{
  EXPECT_THROW(generate_master_path(base, {1, 1.0}, 1, 1, 0), DomainError);
  EXPECT_THROW(generate_master_path(base, {4, 0.0}, 1, 1, 0), DomainError);
  EXPECT_THROW(generate_master_path(base, {4, 1.0}, 0, 1, 0), DomainError);
}

TEST(MasterPath, OverflowIsCapacityError)
{
  const Eigen::Index huge = std::numeric_limits<Eigen::Index>::max() / 2;
  EXPECT_THROW(generate_master_path(base, {huge, 1.0}, 4, 1, 0), CapacityError);
}

TEST(Observation, RefineOneIsIdentity)
{
  const auto p = generate_master_path(base, {6, 1.0}, 1, 3, 0);
  EXPECT_EQ(Eigen::VectorXd(observation_values(p)), p.values());
}

TEST(Observation, StrideIsRefine)
{
  const auto p = generate_master_path(base, {4, 1.0}, 10, 3, 0);
  const auto v = observation_values(p);
  ASSERT_EQ(v.size(), 5);
  for (Eigen::Index i = 0; i < 5; ++i)
    EXPECT_EQ(v[i], p.values()[10 * i]);
}

TEST(Subsample, FullNEqualsObservation)
{
  const auto p = generate_master_path(base, {12, 1.0}, 3, 3, 0);
  EXPECT_EQ(Eigen::VectorXd(subsample_nested(p, 12)), Eigen::VectorXd(observation_values(p)));
}

TEST(Subsample, Stride)
{
  const auto p = generate_master_path(base, {8, 1.0}, 1, 3, 0);
  const auto v = subsample_nested(p, 2);
  ASSERT_EQ(v.size(), 3);
  EXPECT_EQ(v[0], p.values()[0]);
  EXPECT_EQ(v[1], p.values()[4]);
  EXPECT_EQ(v[2], p.values()[8]);
}

TEST(Subsample, NestedChainIsSubsequence)
{
  const auto p = generate_master_path(base, {64, 1.0}, 2, 3, 0);
  for (Eigen::Index a = 1; a <= 64; a *= 2) {
    for (Eigen::Index b = a; b <= 64; b *= 2) {
      const auto coarse = subsample_nested(p, a);
      const auto fine = subsample_nested(p, b);
      for (Eigen::Index i = 0; i <= a; ++i)
        ASSERT_EQ(coarse[i], fine[i * (b / a)]);
    }
  }
}

TEST(Subsample, NonDivisorRejected)
{
  const auto p = generate_master_path(base, {12, 1.0}, 1, 3, 0);
  EXPECT_THROW(subsample_nested(p, 5), DomainError);
  EXPECT_THROW(subsample_nested(p, 0), DomainError);
  EXPECT_THROW(subsample_nested(p, 24), DomainError);
}

TEST(Refine, Policy)
{
  const SamplingGrid g{23400, 1.0 / 252};
  EXPECT_EQ(default_refine(base, g, 0.005), 10);
  EXPECT_EQ(default_refine(base, g, 0.0), 10);
  const double var_dt = 0.04 * g.dt();
  EXPECT_EQ(required_refine(base, g, 5e-5), static_cast<Eigen::Index>(std::ceil(16.0 * var_dt / 2.5e-9)));
  EXPECT_EQ(default_refine(base, g, 5e-5), 44);
  const auto r = required_refine(base, g, 5e-5);
  EXPECT_LE(0.2 * std::sqrt(g.dt() / static_cast<double>(r)), 5e-5 / 4.0);
}

TEST(Schedule, ExactIntegrals)
{
  ProcessModel m;
  m.schedule = {{0.0, 0.1, 0.2}, {0.5, -0.1, 0.4}};
  EXPECT_DOUBLE_EQ(m.sigma_at(0.25), 0.2);
  EXPECT_DOUBLE_EQ(m.sigma_at(0.75), 0.4);
  EXPECT_NEAR(m.integrated_variance(0.0, 1.0), 0.5 * 0.04 + 0.5 * 0.16, 1e-15);
  EXPECT_NEAR(m.integrated_drift(0.25, 0.75), 0.25 * 0.1 - 0.25 * 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(m.max_sigma(), 0.4);
}

TEST(Schedule, InvalidScheduleRejected)
{
  ProcessModel m;
  m.schedule = {{0.1, 0.0, 0.2}};
  EXPECT_THROW(m.validate(), ModelError);
  m.schedule = {{0.0, 0.0, 0.2}, {0.0, 0.0, 0.3}};
  EXPECT_THROW(m.validate(), ModelError);
  m.schedule = {{0.0, 0.0, 0.2}, {0.5, 0.0, -0.3}};
  EXPECT_THROW(m.validate(), ModelError);
}

TEST(Schedule, TerminalVarianceMatchesIntegral)
{
  ProcessModel m;
  m.schedule = {{0.0, 0.0, 0.1}, {0.5, 0.0, 0.3}};
  const SamplingGrid g{10, 1.0};
  const int M = 10000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < M; ++i) {
    const double x = generate_master_path(m, g, 1, 77, i).values()[10];
    s1 += x;
    s2 += x * x;
  }
  const double var = (s2 - s1 * s1 / M) / (M - 1);
  EXPECT_NEAR(var / m.integrated_variance(0.0, 1.0), 1.0, 5.0 / std::sqrt(M) * std::sqrt(2.0));
}

} // namespace
