#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace depthkit {

enum class GridKind { kDepth, kDisparity, kGeneric };

/// Space in which an alignment was solved.
enum class AlignSpace { kDepth, kDisparity };

enum class Representation {
  kMetricDepth,
  kAffineInvariantDepth,
  kAffineInvariantDisparity,
  kAffineInvariantPointMap,
};

std::string_view to_string(GridKind kind);
std::string_view to_string(AlignSpace space);
std::string_view to_string(Representation repr);

/// Default floor below which a value has no usable reciprocal.
inline constexpr double kDefaultReciprocalFloor = 1e-9;

/// Row-major grid of doubles. Pixel (x, y) lives at index y * width + x.
class DepthGrid {
 public:
  DepthGrid(std::size_t width, std::size_t height, std::vector<double> values,
            GridKind kind = GridKind::kGeneric);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  GridKind kind() const noexcept { return kind_; }

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double at(std::size_t x, std::size_t y) const;

  bool same_shape(const DepthGrid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const DepthGrid&, const DepthGrid&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> values_;
  GridKind kind_;
};

class ValidityMask {
 public:
  /// All-valid (or all-invalid) mask.
  ValidityMask(std::size_t width, std::size_t height, bool fill = true);
  ValidityMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count() const noexcept;

  bool matches(const DepthGrid& grid) const noexcept {
    return width_ == grid.width() && height_ == grid.height();
  }

  friend bool operator==(const ValidityMask&, const ValidityMask&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> bits_;
};

struct AlignmentParams {
  double scale = 1.0;
  double shift = 0.0;
  AlignSpace space = AlignSpace::kDepth;

  static AlignmentParams identity(AlignSpace space = AlignSpace::kDepth) {
    return {1.0, 0.0, space};
  }

  friend bool operator==(const AlignmentParams&, const AlignmentParams&) = default;
};

struct CameraIntrinsics {
  double fx;
  double fy;
  double cx;
  double cy;

  /// Throws kInvalidArgument unless both focal lengths are positive.
  void validate() const;
};

DepthGrid make_grid(std::size_t width, std::size_t height, double fill,
                    GridKind kind = GridKind::kGeneric);

/// Mask of pixels whose value is finite.
ValidityMask finite_mask(const DepthGrid& grid);

/// Reciprocal of every pixel. Pixels below `floor` (and pixels already
/// invalid in `mask`) become NaN and are cleared in the returned mask.
/// Depth and disparity kinds swap; generic stays generic.
std::pair<DepthGrid, ValidityMask> invert_grid(const DepthGrid& grid,
                                               double floor = kDefaultReciprocalFloor);
std::pair<DepthGrid, ValidityMask> invert_grid(const DepthGrid& grid, const ValidityMask& mask,
                                               double floor = kDefaultReciprocalFloor);

/// Pixelwise scale * v + shift.
DepthGrid apply_affine(const DepthGrid& grid, const AlignmentParams& params);

ValidityMask intersect_masks(const ValidityMask& a, const ValidityMask& b);

}  // namespace depthkit
