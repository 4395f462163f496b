#include <gtest/gtest.h>

#include <cmath>

#include "depthkit/rng.hpp"
#include "test_util.hpp"

namespace depthkit {
namespace {

TEST(Rng, SameSpecSameStream) {
  Rng a({42, 3});
  Rng b({42, 3});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, StreamsDiffer) {
  Rng a({42, 0});
  Rng b({42, 1});
  Rng c({43, 0});
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    same_ab += x == b();
    same_ac += x == c();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Rng, Uniform01Range) {
  Rng rng({1, 0});
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsInRangeAndCoversAll) {
  Rng rng({9, 9});
  int seen[7] = {};
  for (int i = 0; i < 7000; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++seen[k];
  }
  for (const int s : seen) EXPECT_GT(s, 800);
}

TEST(Draws, ZeroSigmaGivesExactZero) {
  Rng rng({5, 0});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(gaussian_draw(rng, 0.0), 0.0);
}

TEST(Draws, GaussianConsumesTwoUniformsRegardlessOfSigma) {
  Rng a({5, 0});
  Rng b({5, 0});
  (void)gaussian_draw(a, 0.0);
  (void)gaussian_draw(b, 3.0);
  EXPECT_EQ(a(), b());
}

TEST(Draws, UniformMeanLawOfLargeNumbers) {
  Rng rng({2024, 0});
  double sum = 0.0;
  constexpr int kN = 1'000'000;
  for (int i = 0; i < kN; ++i) sum += uniform_draw(rng, 0.0, 10.0);
  const double mean = sum / kN;
  EXPECT_GE(mean, 4.99);
  EXPECT_LE(mean, 5.01);
}

TEST(Draws, GaussianStdDev) {
  Rng rng({2024, 1});
  constexpr int kN = 1'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double g = gaussian_draw(rng, 0.018);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / kN;
  const double sd = std::sqrt(sum_sq / kN - mean * mean);
  EXPECT_GE(sd, 0.0178);
  EXPECT_LE(sd, 0.0182);
  EXPECT_NEAR(mean, 0.0, 1e-4);
}

TEST(Draws, PositiveUniformExcludesZero) {
  Rng rng({0, 0});
  for (int i = 0; i < 100000; ++i) {
    const double v = positive_uniform_draw(rng, 10.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 10.0);
  }
}

TEST(Draws, InvalidArguments) {
  Rng rng({0, 0});
  EXPECT_THROW_CODE(gaussian_draw(rng, -1.0), ErrorCode::kInvalidArgument);
  EXPECT_THROW_CODE(uniform_draw(rng, 1.0, 1.0), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace depthkit
