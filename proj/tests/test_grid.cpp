#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "depthkit/error.hpp"
#include "depthkit/grid.hpp"
#include "test_util.hpp"

namespace depthkit {
namespace {

TEST(MakeGrid, ConstantFill) {
  const DepthGrid g = make_grid(2, 2, 0.0);
  EXPECT_EQ(g.size(), 4u);
  for (const double v : g.values()) EXPECT_EQ(v, 0.0);

  const DepthGrid col = make_grid(1, 3, 5.0, GridKind::kDepth);
  EXPECT_EQ(col.width(), 1u);
  EXPECT_EQ(col.height(), 3u);
  EXPECT_EQ(col.kind(), GridKind::kDepth);
  for (const double v : col.values()) EXPECT_EQ(v, 5.0);
  EXPECT_EQ(finite_mask(col).count(), 3u);
}

TEST(MakeGrid, RejectsZeroDimensionAndNonFiniteFill) {
  EXPECT_THROW_CODE(make_grid(0, 3, 1.0, GridKind::kDepth), ErrorCode::kInvalidArgument);
  EXPECT_THROW_CODE(make_grid(3, 0, 1.0), ErrorCode::kInvalidArgument);
  EXPECT_THROW_CODE(make_grid(1, 1, NAN), ErrorCode::kInvalidArgument);
}

TEST(DepthGrid, RejectsWrongValueCount) {
  EXPECT_THROW_CODE(DepthGrid(2, 2, {1.0, 2.0, 3.0}), ErrorCode::kInvalidArgument);
}

TEST(DepthGrid, RowMajorIndexing) {
  const DepthGrid g(3, 2, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(2, 0), 2.0);
  EXPECT_EQ(g.at(0, 1), 3.0);
  EXPECT_THROW_CODE(g.at(3, 0), ErrorCode::kInvalidArgument);
}

TEST(InvertGrid, ExactReciprocals) {
  const DepthGrid g(3, 1, {1.0, 2.0, 4.0}, GridKind::kDepth);
  const auto [inv, mask] = invert_grid(g, 1e-9);
  EXPECT_EQ(inv[0], 1.0);
  EXPECT_EQ(inv[1], 0.5);
  EXPECT_EQ(inv[2], 0.25);
  EXPECT_EQ(mask.count(), 3u);
  EXPECT_EQ(inv.kind(), GridKind::kDisparity);
}

TEST(InvertGrid, ZeroBecomesInvalid) {
  const DepthGrid g(3, 1, {1.0, 0.0, 2.0}, GridKind::kDepth);
  const auto [inv, mask] = invert_grid(g);
  EXPECT_TRUE(mask[0]);
  EXPECT_FALSE(mask[1]);
  EXPECT_TRUE(mask[2]);
  EXPECT_EQ(inv[0], 1.0);
  EXPECT_EQ(inv[2], 0.5);
  EXPECT_FALSE(std::isinf(inv[1]));
}

TEST(InvertGrid, NegativeAndNaNAreInvalid) {
  const DepthGrid g(3, 1, {-1.0, NAN, 3.0});
  const auto [inv, mask] = invert_grid(g);
  EXPECT_EQ(mask.count(), 1u);
  EXPECT_TRUE(mask[2]);
  EXPECT_EQ(inv.kind(), GridKind::kGeneric);
}

TEST(InvertGrid, RejectsNonPositiveFloor) {
  EXPECT_THROW_CODE(invert_grid(make_grid(1, 1, 1.0), 0.0), ErrorCode::kInvalidArgument);
}

TEST(InvertGrid, InvolutionProperty) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(1e-6, 1e6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(64);
    for (auto& x : v) x = dist(gen);
    const DepthGrid g(8, 8, v, GridKind::kDepth);
    const auto [once, m1] = invert_grid(g);
    const auto [twice, m2] = invert_grid(once, m1);
    ASSERT_EQ(twice.kind(), GridKind::kDepth);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_TRUE(m2[i]);
      ASSERT_LE(std::abs(twice[i] - v[i]) / v[i], 1e-12);
    }
  }
}

TEST(ApplyAffine, HandArithmetic) {
  const DepthGrid g(2, 1, {1.0, 2.0});
  const DepthGrid out = apply_affine(g, {2.0, 3.0, AlignSpace::kDepth});
  EXPECT_EQ(out[0], 5.0);
  EXPECT_EQ(out[1], 7.0);
}

TEST(ApplyAffine, IdentityIsBytewise) {
  const DepthGrid g(3, 1, {1.0, -0.0, 1e-300});
  const DepthGrid out = apply_affine(g, AlignmentParams::identity());
  ASSERT_EQ(out.size(), g.size());
  EXPECT_EQ(std::memcmp(out.values().data(), g.values().data(), g.size() * sizeof(double)), 0);
}

TEST(ApplyAffine, InverseCompositionProperty) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(16);
    for (auto& x : v) x = val(gen);
    const DepthGrid g(4, 4, v);
    const double s = (trial % 2 ? 1 : -1) * scale(gen);
    const double b = val(gen);
    const DepthGrid there = apply_affine(g, {s, b, AlignSpace::kDepth});
    const DepthGrid back = apply_affine(there, {1.0 / s, -b / s, AlignSpace::kDepth});
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_NEAR(back[i], v[i], 1e-12 * std::max(1.0, std::abs(v[i])) * 100);
    }
  }
  const DepthGrid g(2, 1, {1.0, 2.0});
  const DepthGrid back = apply_affine(apply_affine(g, {2.0, 3.0, AlignSpace::kDepth}),
                                      {0.5, -1.5, AlignSpace::kDepth});
  EXPECT_EQ(back[0], 1.0);
  EXPECT_EQ(back[1], 2.0);
}

TEST(ApplyAffine, RejectsNonFiniteParams) {
  EXPECT_THROW_CODE(apply_affine(make_grid(1, 1, 1.0), {NAN, 0.0, AlignSpace::kDepth}),
                    ErrorCode::kInvalidArgument);
}

TEST(IntersectMasks, TruthTable) {
  const ValidityMask all(2, 2, true);
  const ValidityMask none(2, 2, false);
  EXPECT_EQ(intersect_masks(all, all), all);
  EXPECT_EQ(intersect_masks(all, none), none);
  const ValidityMask a(2, 1, std::vector<std::uint8_t>{1, 0});
  const ValidityMask b(2, 1, std::vector<std::uint8_t>{1, 1});
  EXPECT_EQ(intersect_masks(a, b).count(), 1u);
}

TEST(IntersectMasks, ShapeMismatch) {
  EXPECT_THROW_CODE(intersect_masks(ValidityMask(2, 2), ValidityMask(4, 1)),
                    ErrorCode::kInvalidArgument);
}

TEST(GridOps, NoNaNOnValidPixels) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const DepthGrid g = make_grid(5, 5, val(gen), GridKind::kDepth);
    const DepthGrid a = apply_affine(g, {val(gen), val(gen), AlignSpace::kDepth});
    const auto [inv, mask] = invert_grid(a);
    for (std::size_t i = 0; i < inv.size(); ++i) {
      EXPECT_FALSE(std::isnan(a[i]));
      if (mask[i]) EXPECT_TRUE(std::isfinite(inv[i]));
    }
  }
}

}  // namespace
}  // namespace depthkit
