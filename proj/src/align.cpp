#include "depthkit/align.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depthkit/error.hpp"
#include "depthkit/rng.hpp"

namespace depthkit {

namespace {

constexpr double kDegenerateVariance = 1e-15;
constexpr double kResidualFloor = 1e-9;
constexpr double kPrincipalAxisExclusion = 2.0;

void check_shapes(const DepthGrid& pred, const DepthGrid& target, const ValidityMask& mask) {
  if (!pred.same_shape(target) || !mask.matches(pred)) {
    fail(ErrorCode::kInvalidArgument,
         "shape mismatch: pred " + std::to_string(pred.width()) + "x" +
             std::to_string(pred.height()) + ", target " + std::to_string(target.width()) +
             "x" + std::to_string(target.height()));
  }
}

/// Valid pixel indices in ascending order; rejects non-finite valid pixels.
std::vector<std::size_t> valid_indices(const DepthGrid& pred, const DepthGrid& target,
                                       const ValidityMask& mask) {
  check_shapes(pred, target, mask);
  std::vector<std::size_t> idx;
  idx.reserve(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (!std::isfinite(pred[i]) || !std::isfinite(target[i])) {
      fail(ErrorCode::kInvalidArgument,
           "non-finite value on valid pixel " + std::to_string(i));
    }
    idx.push_back(i);
  }
  return idx;
}

AlignmentParams fit_indices(const DepthGrid& pred, const DepthGrid& target,
                            const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) {
    fail(ErrorCode::kInsufficientData, "scale-shift fit needs at least 2 valid pixels");
  }
  const double n = static_cast<double>(idx.size());
  double sum_p = 0.0;
  double sum_t = 0.0;
  for (const auto i : idx) {
    sum_p += pred[i];
    sum_t += target[i];
  }
  const double mean_p = sum_p / n;
  const double mean_t = sum_t / n;

  double cov = 0.0;
  double var = 0.0;
  for (const auto i : idx) {
    const double dp = pred[i] - mean_p;
    cov += dp * (target[i] - mean_t);
    var += dp * dp;
  }
  cov /= n;
  var /= n;
  if (var < kDegenerateVariance) {
    fail(ErrorCode::kDegeneratePrediction, "prediction is constant over the valid pixels");
  }
  const double scale = cov / var;
  return {scale, mean_t - scale * mean_p, AlignSpace::kDepth};
}

double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

AlignmentParams solve_with(const DepthGrid& pred, const DepthGrid& target,
                           const ValidityMask& mask, const AlignSpec& spec) {
  switch (spec.solver) {
    case Solver::kNone:
      return AlignmentParams::identity();
    case Solver::kLsqScaleShift:
      return solve_scale_shift_lsq(pred, target, mask);
    case Solver::kLsqScaleOnly:
      return solve_scale_lsq(pred, target, mask);
    case Solver::kMedianScaleOnly:
      return solve_scale_median(pred, target, mask);
    case Solver::kRansacScaleShift:
      return solve_ransac(pred, target, mask, spec.ransac.value_or(RansacConfig{}));
  }
  fail(ErrorCode::kInvalidArgument, "unknown solver");
}

DepthGrid with_kind(const DepthGrid& g, GridKind kind) {
  if (g.kind() == kind) return g;
  const auto v = g.values();
  return DepthGrid(g.width(), g.height(), std::vector<double>(v.begin(), v.end()), kind);
}

ValidityMask finite_and(const DepthGrid& g, const ValidityMask& mask) {
  return intersect_masks(mask, finite_mask(g));
}

AlignedPrediction depth_route(const DepthGrid& pred, const DepthGrid& gt,
                              const ValidityMask& mask, const AlignSpec& spec) {
  const ValidityMask m = finite_and(pred, mask);
  AlignmentParams params = solve_with(pred, gt, m, spec);
  params.space = AlignSpace::kDepth;
  return {with_kind(apply_affine(pred, params), GridKind::kDepth), params, m, std::nullopt};
}

AlignedPrediction disparity_route(const DepthGrid& pred_disp, const DepthGrid& gt,
                                  const ValidityMask& mask, const AlignSpec& spec) {
  auto [gt_disp, gt_mask] = invert_grid(with_kind(gt, GridKind::kDepth), mask);
  const ValidityMask m = finite_and(pred_disp, gt_mask);
  AlignmentParams params = solve_with(pred_disp, gt_disp, m, spec);
  params.space = AlignSpace::kDisparity;
  const DepthGrid aligned_disp = with_kind(apply_affine(pred_disp, params), GridKind::kDisparity);
  auto [depth, depth_mask] = invert_grid(aligned_disp, m);
  return {std::move(depth), params, std::move(depth_mask), std::nullopt};
}

std::string mismatch(Representation repr, std::string_view why) {
  return std::string(to_string(repr)) + ": " + std::string(why);
}

}  // namespace

std::string_view to_string(Solver solver) {
  switch (solver) {
    case Solver::kLsqScaleShift: return "lsq-scale-shift";
    case Solver::kLsqScaleOnly: return "lsq-scale-only";
    case Solver::kMedianScaleOnly: return "median-scale-only";
    case Solver::kRansacScaleShift: return "ransac-scale-shift";
    case Solver::kNone: return "none";
  }
  return "none";
}

void RansacConfig::validate() const {
  if (iterations < 1) fail(ErrorCode::kInvalidArgument, "ransac iterations must be >= 1");
  if (sample_size != 2) fail(ErrorCode::kInvalidArgument, "ransac sample size must be 2");
  if (!(inlier_threshold > 0.0 && inlier_threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "ransac inlier threshold must lie in (0, 1)");
  }
}

PointMap::PointMap(std::size_t width, std::size_t height, std::vector<double> xyz)
    : width_(width), height_(height), xyz_(std::move(xyz)) {
  if (width == 0 || height == 0) {
    fail(ErrorCode::kInvalidArgument, "point map dimensions must be positive");
  }
  if (xyz_.size() != 3 * width * height) {
    fail(ErrorCode::kInvalidArgument, "point map needs three values per pixel");
  }
}

DepthGrid PointMap::z_channel() const {
  std::vector<double> z(pixels());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = this->z(i);
  return DepthGrid(width_, height_, std::move(z), GridKind::kDepth);
}

AlignmentParams solve_scale_shift_lsq(const DepthGrid& pred, const DepthGrid& target,
                                      const ValidityMask& mask) {
  return fit_indices(pred, target, valid_indices(pred, target, mask));
}

AlignmentParams solve_scale_lsq(const DepthGrid& pred, const DepthGrid& target,
                                const ValidityMask& mask) {
  const auto idx = valid_indices(pred, target, mask);
  if (idx.empty()) fail(ErrorCode::kInsufficientData, "scale fit needs a valid pixel");
  double pt = 0.0;
  double pp = 0.0;
  for (const auto i : idx) {
    pt += pred[i] * target[i];
    pp += pred[i] * pred[i];
  }
  if (pp / static_cast<double>(idx.size()) < kDegenerateVariance) {
    fail(ErrorCode::kDegeneratePrediction, "prediction is zero over the valid pixels");
  }
  return {pt / pp, 0.0, AlignSpace::kDepth};
}

AlignmentParams solve_scale_median(const DepthGrid& pred, const DepthGrid& target,
                                   const ValidityMask& mask) {
  const auto idx = valid_indices(pred, target, mask);
  std::vector<double> ratios;
  ratios.reserve(idx.size());
  for (const auto i : idx) {
    if (pred[i] > 0.0 && target[i] > 0.0) ratios.push_back(target[i] / pred[i]);
  }
  if (ratios.empty()) {
    fail(ErrorCode::kInsufficientData, "no valid pixel with positive prediction and target");
  }
  return {median_inplace(ratios), 0.0, AlignSpace::kDepth};
}

AlignmentParams solve_ransac(const DepthGrid& pred, const DepthGrid& target,
                             const ValidityMask& mask, const RansacConfig& cfg) {
  cfg.validate();
  const auto idx = valid_indices(pred, target, mask);
  const std::size_t n = idx.size();
  if (n < static_cast<std::size_t>(cfg.sample_size)) {
    fail(ErrorCode::kInsufficientData, "ransac needs at least 2 valid pixels");
  }

  std::vector<double> tolerance(n);
  for (std::size_t k = 0; k < n; ++k) {
    tolerance[k] = cfg.inlier_threshold * std::max(std::abs(target[idx[k]]), kResidualFloor);
  }

  Rng rng({cfg.seed, 0});
  std::size_t best_count = 0;
  double best_scale = 0.0;
  double best_shift = 0.0;
  bool found = false;

  for (int it = 0; it < cfg.iterations; ++it) {
    const std::size_t a = rng.below(n);
    std::size_t b = rng.below(n - 1);
    if (b >= a) ++b;
    const double pa = pred[idx[a]];
    const double pb = pred[idx[b]];
    if (pa == pb) continue;
    const double scale = (target[idx[a]] - target[idx[b]]) / (pa - pb);
    const double shift = target[idx[a]] - scale * pa;
    if (!std::isfinite(scale) || !std::isfinite(shift)) continue;

    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = idx[k];
      if (std::abs(scale * pred[i] + shift - target[i]) <= tolerance[k]) ++count;
    }
    if (!found || count > best_count) {
      found = true;
      best_count = count;
      best_scale = scale;
      best_shift = shift;
    }
  }
  if (!found) {
    fail(ErrorCode::kDegeneratePrediction, "every ransac sample was degenerate");
  }

  std::vector<std::size_t> inliers;
  inliers.reserve(best_count);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = idx[k];
    if (std::abs(best_scale * pred[i] + best_shift - target[i]) <= tolerance[k]) {
      inliers.push_back(i);
    }
  }
  try {
    return fit_indices(pred, target, inliers);
  } catch (const Error&) {
    // Rounding can push a sample pixel past a tiny tolerance; keep the sample fit.
    return {best_scale, best_shift, AlignSpace::kDepth};
  }
}

namespace {

double recover_shift(const PointMap& pm, const ValidityMask& mask, double focal,
                     double principal, bool use_rows) {
  if (mask.width() != pm.width() || mask.height() != pm.height()) {
    fail(ErrorCode::kInvalidArgument, "mask/point-map shape mismatch");
  }
  std::vector<double> votes;
  for (std::size_t row = 0; row < pm.height(); ++row) {
    for (std::size_t col = 0; col < pm.width(); ++col) {
      const std::size_t i = row * pm.width() + col;
      if (!mask[i]) continue;
      const double offset = static_cast<double>(use_rows ? row : col) - principal;
      if (std::abs(offset) <= kPrincipalAxisExclusion) continue;
      const double lateral = use_rows ? pm.y(i) : pm.x(i);
      const double vote = pm.z(i) - lateral * focal / offset;
      if (std::isfinite(vote)) votes.push_back(vote);
    }
  }
  if (votes.empty()) {
    fail(ErrorCode::kInsufficientData, "no valid pixel away from the principal axis");
  }
  return median_inplace(votes);
}

}  // namespace

double recover_pointmap_shift(const PointMap& pm, const CameraIntrinsics& intr,
                              const ValidityMask& mask) {
  intr.validate();
  return recover_shift(pm, mask, intr.fx, intr.cx, false);
}

double recover_pointmap_shift_from_y(const PointMap& pm, const CameraIntrinsics& intr,
                                     const ValidityMask& mask) {
  intr.validate();
  return recover_shift(pm, mask, intr.fy, intr.cy, true);
}

AlignedPrediction align_prediction(const Prediction& pred, const DepthGrid& gt_depth,
                                   Representation repr, const AlignSpec& spec,
                                   const ValidityMask& mask,
                                   const std::optional<CameraIntrinsics>& intrinsics) {
  if (!mask.matches(gt_depth)) fail(ErrorCode::kInvalidArgument, "mask/gt shape mismatch");
  for (std::size_t i = 0; i < gt_depth.size(); ++i) {
    if (mask[i] && !(gt_depth[i] > 0.0 && std::isfinite(gt_depth[i]))) {
      fail(ErrorCode::kInvalidArgument,
           "ground truth must be positive and finite on valid pixels");
    }
  }
  if (spec.solver == Solver::kRansacScaleShift && spec.ransac) spec.ransac->validate();

  const bool is_pointmap = std::holds_alternative<PointMap>(pred);
  if (is_pointmap != (repr == Representation::kAffineInvariantPointMap)) {
    fail(ErrorCode::kInvalidArgument, mismatch(repr, "prediction payload does not match"));
  }

  switch (repr) {
    case Representation::kMetricDepth:
    case Representation::kAffineInvariantDepth: {
      if (spec.space != AlignSpace::kDepth) {
        fail(ErrorCode::kInvalidArgument, mismatch(repr, "aligns in depth space only"));
      }
      const auto& p = std::get<DepthGrid>(pred);
      if (!p.same_shape(gt_depth)) fail(ErrorCode::kInvalidArgument, "pred/gt shape mismatch");
      return depth_route(p, gt_depth, mask, spec);
    }
    case Representation::kAffineInvariantDisparity: {
      if (spec.space != AlignSpace::kDisparity) {
        fail(ErrorCode::kInvalidArgument, mismatch(repr, "aligns in disparity space only"));
      }
      const auto& p = std::get<DepthGrid>(pred);
      if (!p.same_shape(gt_depth)) fail(ErrorCode::kInvalidArgument, "pred/gt shape mismatch");
      return disparity_route(with_kind(p, GridKind::kDisparity), gt_depth, mask, spec);
    }
    case Representation::kAffineInvariantPointMap: {
      if (!intrinsics) fail(ErrorCode::kInvalidArgument, mismatch(repr, "needs intrinsics"));
      const auto& pm = std::get<PointMap>(pred);
      if (pm.width() != gt_depth.width() || pm.height() != gt_depth.height()) {
        fail(ErrorCode::kInvalidArgument, "pred/gt shape mismatch");
      }
      const double shift = recover_pointmap_shift(pm, *intrinsics, mask);
      const DepthGrid z = apply_affine(pm.z_channel(), {1.0, -shift, AlignSpace::kDepth});
      AlignedPrediction out = [&] {
        if (spec.space == AlignSpace::kDisparity) {
          auto [disp, disp_mask] = invert_grid(z, finite_and(z, mask));
          return disparity_route(disp, gt_depth, disp_mask, spec);
        }
        return depth_route(z, gt_depth, mask, spec);
      }();
      out.pointmap_shift = shift;
      return out;
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown representation");
}

}  // namespace depthkit
