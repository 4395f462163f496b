#include "depthkit/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"

#include "depthkit/error.hpp"

namespace depthkit {

namespace {

/// Calls fn(a, d) for every valid pixel in index order; returns the count.
template <typename Fn>
std::size_t for_valid(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask,
                      Fn&& fn) {
  if (!aligned.same_shape(gt) || !mask.matches(gt)) {
    fail(ErrorCode::kInvalidArgument, "aligned/gt/mask shape mismatch");
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask[i]) continue;
    fn(aligned[i], gt[i]);
    ++n;
  }
  if (n == 0) fail(ErrorCode::kInsufficientData, "no valid pixels");
  return n;
}

void require_positive_gt(double d) {
  if (!(d > 0.0)) fail(ErrorCode::kInvalidArgument, "ground truth must be positive");
}

double round_sig(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

}  // namespace

double delta_accuracy(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask,
                      double threshold) {
  if (!(threshold > 1.0)) fail(ErrorCode::kInvalidArgument, "delta threshold must exceed 1");
  std::size_t hits = 0;
  const std::size_t n = for_valid(aligned, gt, mask, [&](double a, double d) {
    require_positive_gt(d);
    if (!(a > 0.0)) return;
    if (std::max(a / d, d / a) < threshold) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(n);
}

double abs_rel(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask) {
  double sum = 0.0;
  const std::size_t n = for_valid(aligned, gt, mask, [&](double a, double d) {
    require_positive_gt(d);
    sum += std::abs(a - d) / d;
  });
  return sum / static_cast<double>(n);
}

double rmse(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask) {
  double sum = 0.0;
  const std::size_t n = for_valid(aligned, gt, mask, [&](double a, double d) {
    sum += (a - d) * (a - d);
  });
  return std::sqrt(sum / static_cast<double>(n));
}

double mae(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask) {
  double sum = 0.0;
  const std::size_t n =
      for_valid(aligned, gt, mask, [&](double a, double d) { sum += std::abs(a - d); });
  return sum / static_cast<double>(n);
}

double bad_pixel_rate(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask,
                      double threshold) {
  if (!(threshold > 0.0)) fail(ErrorCode::kInvalidArgument, "bad-pixel threshold must be > 0");
  std::size_t bad = 0;
  const std::size_t n = for_valid(aligned, gt, mask, [&](double a, double d) {
    if (std::abs(a - d) > threshold) ++bad;
  });
  return static_cast<double>(bad) / static_cast<double>(n);
}

MetricReport compute_metrics(const DepthGrid& aligned, const DepthGrid& gt,
                             const ValidityMask& mask,
                             const std::vector<double>& bad_thresholds) {
  MetricReport r;
  r.delta1 = delta_accuracy(aligned, gt, mask, kDeltaBase);
  r.delta2 = delta_accuracy(aligned, gt, mask, kDeltaBase * kDeltaBase);
  r.delta3 = delta_accuracy(aligned, gt, mask, kDeltaBase * kDeltaBase * kDeltaBase);
  r.abs_rel = abs_rel(aligned, gt, mask);
  r.rmse = rmse(aligned, gt, mask);
  r.mae = mae(aligned, gt, mask);
  for (const double t : bad_thresholds) r.bad_pixel[t] = bad_pixel_rate(aligned, gt, mask, t);
  r.valid_count = mask.count();
  return r;
}

Evaluation evaluate(const Prediction& pred, const DepthGrid& gt_depth, Representation repr,
                    const AlignSpec& spec, const ValidityMask& mask,
                    const std::optional<CameraIntrinsics>& intrinsics,
                    const std::vector<double>& bad_thresholds) {
  AlignedPrediction aligned = align_prediction(pred, gt_depth, repr, spec, mask, intrinsics);
  MetricReport report = compute_metrics(aligned.depth, gt_depth, aligned.mask, bad_thresholds);
  return {std::move(report), std::move(aligned)};
}

std::string to_json(const MetricReport& report, int indent) {
  nlohmann::ordered_json j;
  j["delta1"] = round_sig(report.delta1, 6);
  j["delta2"] = round_sig(report.delta2, 6);
  j["delta3"] = round_sig(report.delta3, 6);
  j["abs_rel"] = round_sig(report.abs_rel, 6);
  j["rmse"] = round_sig(report.rmse, 6);
  j["mae"] = round_sig(report.mae, 6);
  nlohmann::ordered_json bad = nlohmann::ordered_json::object();
  for (const auto& [t, frac] : report.bad_pixel) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", t);
    bad[key] = round_sig(frac, 6);
  }
  j["bad_pixel"] = bad;
  j["valid_count"] = report.valid_count;
  return j.dump(indent);
}

std::string to_json(const AlignmentParams& params, int indent) {
  nlohmann::ordered_json j;
  j["scale"] = round_sig(params.scale, 6);
  j["shift"] = round_sig(params.shift, 6);
  j["space"] = std::string(to_string(params.space));
  return j.dump(indent);
}

}  // namespace depthkit
