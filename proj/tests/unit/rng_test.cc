// Tests for the seeded random stream.

#include "adl/core/rng.h"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

namespace adl {
namespace {

// Reference SplitMix64 outputs (seed 0 and seed 12345), computed with an
// independent big-integer implementation.
TEST(SeededRngTest, MatchesReferenceSequence) {
  SeededRng a(0);
  EXPECT_EQ(a.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(a.next_u64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(a.next_u64(), 0x06C45D188009454FULL);

  SeededRng b(12345);
  EXPECT_EQ(b.next_u64(), 0x22118258A9D111A0ULL);
  EXPECT_EQ(b.next_u64(), 0x346EDCE5F713F8EDULL);
}

TEST(SeededRngTest, SameSeedSameSequence) {
  SeededRng a(77), b(77);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_unit(), b.next_unit());
  EXPECT_EQ(a, b);
}

TEST(SeededRngTest, CountsDraws) {
  SeededRng r(99);
  EXPECT_EQ(r.draws(), 0u);
  r.next_u64();
  r.next_unit();
  EXPECT_EQ(r.draws(), 2u);
  r.normal();
  EXPECT_EQ(r.draws(), 4u);
  r.uniform(2.0, 2.0);
  EXPECT_EQ(r.draws(), 5u);
}

TEST(SeededRngTest, UniformStaysInHalfOpenRange) {
  SeededRng r(3);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.uniform(-0.5, 0.25);
    ASSERT_GE(v, -0.5);
    ASSERT_LT(v, 0.25);
  }
  EXPECT_EQ(r.uniform(1.5, 1.5), 1.5);
  EXPECT_THROW(r.uniform(1.0, 0.0), std::invalid_argument);
}

TEST(SeededRngTest, UniformMomentsAreReasonable) {
  SeededRng r(5);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.next_unit();
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(SeededRngTest, NormalMomentsAreReasonable) {
  SeededRng r(8);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(1.0, 2.0);
    ASSERT_TRUE(std::isfinite(x));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 1.0, 0.02);
  EXPECT_NEAR(sq / n - mean * mean, 4.0, 0.06);
}

TEST(SeededRngTest, BelowCoversRangeWithoutBias) {
  SeededRng r(11);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[r.below(3)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(SeededRngTest, ForksAreDistinctAndReproducible) {
  SeededRng root(42);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 64; ++s) {
    SeededRng f = root.fork(s);
    SeededRng g = root.fork(s);
    const std::uint64_t x = f.next_u64();
    EXPECT_EQ(x, g.next_u64());
    firsts.insert(x);
  }
  EXPECT_EQ(firsts.size(), 64u);
  // Forking does not consume draws from the parent.
  EXPECT_EQ(root.draws(), 0u);
  EXPECT_NE(root.fork(0).next_u64(), SeededRng(43).fork(0).next_u64());
}

}  // namespace
}  // namespace adl
