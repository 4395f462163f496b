#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "depthkit/grid.hpp"

namespace depthkit {

enum class Solver {
  kLsqScaleShift,
  kLsqScaleOnly,
  kMedianScaleOnly,
  kRansacScaleShift,
  kNone,
};

std::string_view to_string(Solver solver);

struct RansacConfig {
  int iterations = 256;
  int sample_size = 2;
  /// Inlier residual bound, relative to max(|target|, 1e-9).
  double inlier_threshold = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AlignSpec {
  Solver solver = Solver::kLsqScaleShift;
  AlignSpace space = AlignSpace::kDepth;
  std::optional<RansacConfig> ransac;
};

/// Per-pixel camera-frame coordinates, three interleaved channels (x, y, z).
class PointMap {
 public:
  PointMap(std::size_t width, std::size_t height, std::vector<double> xyz);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  std::span<const double> xyz() const noexcept { return xyz_; }

  double x(std::size_t i) const noexcept { return xyz_[3 * i]; }
  double y(std::size_t i) const noexcept { return xyz_[3 * i + 1]; }
  double z(std::size_t i) const noexcept { return xyz_[3 * i + 2]; }

  DepthGrid z_channel() const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> xyz_;
};

/// Closed-form minimiser of sum (s * p + b - t)^2 over valid pixels.
AlignmentParams solve_scale_shift_lsq(const DepthGrid& pred, const DepthGrid& target,
                                      const ValidityMask& mask);

/// Scale-only least squares: s = sum(p t) / sum(p^2), b = 0.
AlignmentParams solve_scale_lsq(const DepthGrid& pred, const DepthGrid& target,
                                const ValidityMask& mask);

/// s = median of t / p over valid pixels with p > 0 and t > 0; b = 0.
AlignmentParams solve_scale_median(const DepthGrid& pred, const DepthGrid& target,
                                   const ValidityMask& mask);

/// Two-point RANSAC followed by a least-squares refit on the best inlier set.
/// Deterministic in cfg.seed.
AlignmentParams solve_ransac(const DepthGrid& pred, const DepthGrid& target,
                             const ValidityMask& mask, const RansacConfig& cfg);

/// Recovers the z-shift of an affine-invariant pinhole point map from the
/// x channel: every pixel with |u - cx| > 2 votes z - x * fx / (u - cx), and
/// the median vote wins.
double recover_pointmap_shift(const PointMap& pm, const CameraIntrinsics& intr,
                              const ValidityMask& mask);

/// Same estimator on the y channel (fy, cy). Kept separate as a cross-check.
double recover_pointmap_shift_from_y(const PointMap& pm, const CameraIntrinsics& intr,
                                     const ValidityMask& mask);

struct AlignedPrediction {
  DepthGrid depth;
  AlignmentParams params;
  ValidityMask mask;
  /// Set only for point-map predictions.
  std::optional<double> pointmap_shift;
};

using Prediction = std::variant<DepthGrid, PointMap>;

/// Routes a prediction through the alignment its representation calls for and
/// returns it as depth, comparable against `gt_depth`:
///   metric depth           -> unchanged, or solved against gt when a solver is set
///   affine-invariant depth -> solved against gt in depth space
///   affine-invariant disp. -> solved against 1/gt, then inverted back to depth
///   affine-invariant pc    -> shift removed from z, then the depth or disparity
///                             route per spec.space
/// `intrinsics` is required for point maps only.
AlignedPrediction align_prediction(const Prediction& pred, const DepthGrid& gt_depth,
                                   Representation repr, const AlignSpec& spec,
                                   const ValidityMask& mask,
                                   const std::optional<CameraIntrinsics>& intrinsics = {});

}  // namespace depthkit
