#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tsrvlab/rng.hpp"

using namespace tsrv;

namespace {

using Block = std::array<std::uint32_t, 4>;

TEST(Philox, KnownAnswerZero)
{
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes)
{
  const std::uint32_t f = 0xffffffff;
  EXPECT_EQ(philox4x32({f, f, f, f}, {f, f}), (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi)
{
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, SameArgumentsSameSequence)
{
  CounterRng a(42, 7, RngDomain::Contamination);
  CounterRng b(42, 7, RngDomain::Contamination);
  for (int i = 0; i < 1000; ++i)
    ASSERT_EQ(a.normal(), b.normal());
}

TEST(CounterRng, StreamsAndDomainsDiffer)
{
  CounterRng a(42, 0), b(42, 1), c(42, 0, RngDomain::Contamination), d(43, 0);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(CounterRng, CopyReplays)
{
  CounterRng a(1, 2);
  a.normal();
  CounterRng b = a;
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(a.normal(), b.normal());
}

TEST(CounterRng, UniformInOpenUnitInterval)
{
  CounterRng r(9, 0, RngDomain::Test);
  double s = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
  }
  EXPECT_NEAR(s / N, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / N));
}

TEST(CounterRng, NormalMoments)
{
  CounterRng r(11, 3, RngDomain::Test);
  const int N = 400000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < N; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / N, 0.0, 4.0 / std::sqrt(N));
  EXPECT_NEAR(s2 / N, 1.0, 4.0 * std::sqrt(2.0 / N));
  EXPECT_NEAR(s4 / N, 3.0, 4.0 * std::sqrt(96.0 / N));
}

} // namespace
