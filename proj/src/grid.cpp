#include "depthkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "depthkit/error.hpp"

namespace depthkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kDegeneratePrediction: return "degenerate-prediction";
    case ErrorCode::kDegenerateBaseline: return "degenerate-baseline";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

std::string_view to_string(GridKind kind) {
  switch (kind) {
    case GridKind::kDepth: return "depth";
    case GridKind::kDisparity: return "disparity";
    case GridKind::kGeneric: return "generic";
  }
  return "generic";
}

std::string_view to_string(AlignSpace space) {
  return space == AlignSpace::kDepth ? "depth" : "disparity";
}

std::string_view to_string(Representation repr) {
  switch (repr) {
    case Representation::kMetricDepth: return "metric-depth";
    case Representation::kAffineInvariantDepth: return "affine-invariant-depth";
    case Representation::kAffineInvariantDisparity: return "affine-invariant-disparity";
    case Representation::kAffineInvariantPointMap: return "affine-invariant-pointmap";
  }
  return "metric-depth";
}

DepthGrid::DepthGrid(std::size_t width, std::size_t height, std::vector<double> values,
                     GridKind kind)
    : width_(width), height_(height), values_(std::move(values)), kind_(kind) {
  if (width == 0 || height == 0) {
    fail(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  }
  if (values_.size() != width * height) {
    fail(ErrorCode::kInvalidArgument,
         "grid holds " + std::to_string(values_.size()) + " values, expected " +
             std::to_string(width * height));
  }
}

double DepthGrid::at(std::size_t x, std::size_t y) const {
  if (x >= width_ || y >= height_) fail(ErrorCode::kInvalidArgument, "pixel out of range");
  return values_[y * width_ + x];
}

ValidityMask::ValidityMask(std::size_t width, std::size_t height, bool fill)
    : ValidityMask(width, height, std::vector<std::uint8_t>(width * height, fill ? 1 : 0)) {}

ValidityMask::ValidityMask(std::size_t width, std::size_t height,
                           std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width == 0 || height == 0) {
    fail(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  }
  if (bits_.size() != width * height) {
    fail(ErrorCode::kInvalidArgument, "mask size does not match its dimensions");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t ValidityMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    fail(ErrorCode::kInvalidArgument, "principal point must be finite");
  }
}

DepthGrid make_grid(std::size_t width, std::size_t height, double fill, GridKind kind) {
  if (width == 0 || height == 0) {
    fail(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  }
  if (!std::isfinite(fill)) fail(ErrorCode::kInvalidArgument, "fill value must be finite");
  return DepthGrid(width, height, std::vector<double>(width * height, fill), kind);
}

ValidityMask finite_mask(const DepthGrid& grid) {
  std::vector<std::uint8_t> bits(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) bits[i] = std::isfinite(grid[i]) ? 1 : 0;
  return ValidityMask(grid.width(), grid.height(), std::move(bits));
}

std::pair<DepthGrid, ValidityMask> invert_grid(const DepthGrid& grid, double floor) {
  return invert_grid(grid, ValidityMask(grid.width(), grid.height()), floor);
}

std::pair<DepthGrid, ValidityMask> invert_grid(const DepthGrid& grid, const ValidityMask& mask,
                                               double floor) {
  if (!(floor > 0.0)) fail(ErrorCode::kInvalidArgument, "reciprocal floor must be positive");
  if (!mask.matches(grid)) fail(ErrorCode::kInvalidArgument, "mask/grid shape mismatch");

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(grid.size());
  std::vector<std::uint8_t> bits(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    // `v >= floor` is false for NaN, so non-finite inputs drop out as well.
    if (mask[i] && v >= floor && std::isfinite(v)) {
      out[i] = 1.0 / v;
      bits[i] = 1;
    } else {
      out[i] = kNaN;
    }
  }

  GridKind kind = grid.kind();
  if (kind == GridKind::kDepth) {
    kind = GridKind::kDisparity;
  } else if (kind == GridKind::kDisparity) {
    kind = GridKind::kDepth;
  }
  return {DepthGrid(grid.width(), grid.height(), std::move(out), kind),
          ValidityMask(grid.width(), grid.height(), std::move(bits))};
}

DepthGrid apply_affine(const DepthGrid& grid, const AlignmentParams& params) {
  if (!std::isfinite(params.scale) || !std::isfinite(params.shift)) {
    fail(ErrorCode::kInvalidArgument, "alignment parameters must be finite");
  }
  if (params.scale == 1.0 && params.shift == 0.0) return grid;

  std::vector<double> out(grid.size());
  const auto in = grid.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = params.scale * in[i] + params.shift;
  return DepthGrid(grid.width(), grid.height(), std::move(out), grid.kind());
}

ValidityMask intersect_masks(const ValidityMask& a, const ValidityMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorCode::kInvalidArgument, "mask dimensions differ");
  }
  std::vector<std::uint8_t> bits(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) bits[i] = (a[i] && b[i]) ? 1 : 0;
  return ValidityMask(a.width(), a.height(), std::move(bits));
}

}  // namespace depthkit
