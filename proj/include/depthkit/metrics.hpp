#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depthkit/align.hpp"
#include "depthkit/grid.hpp"

namespace depthkit {

inline constexpr double kDeltaBase = 1.25;

struct MetricReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double abs_rel = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  /// Absolute-error threshold -> fraction of pixels exceeding it.
  std::map<double, double> bad_pixel;
  std::size_t valid_count = 0;
};

/// Fraction of valid pixels with max(a / d, d / a) < threshold. Non-positive
/// aligned values always fail.
double delta_accuracy(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask,
                      double threshold = kDeltaBase);

double abs_rel(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask);
double rmse(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask);
double mae(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask);

/// Fraction of valid pixels with |a - d| > threshold.
double bad_pixel_rate(const DepthGrid& aligned, const DepthGrid& gt, const ValidityMask& mask,
                      double threshold);

inline const std::vector<double> kDefaultBadPixelThresholds{1.0, 2.0, 3.0};

/// All metrics on an already aligned prediction.
MetricReport compute_metrics(const DepthGrid& aligned, const DepthGrid& gt,
                             const ValidityMask& mask,
                             const std::vector<double>& bad_thresholds = kDefaultBadPixelThresholds);

struct Evaluation {
  MetricReport report;
  AlignedPrediction alignment;
};

/// align_prediction followed by compute_metrics on the aligned mask.
Evaluation evaluate(const Prediction& pred, const DepthGrid& gt_depth, Representation repr,
                    const AlignSpec& spec, const ValidityMask& mask,
                    const std::optional<CameraIntrinsics>& intrinsics = {},
                    const std::vector<double>& bad_thresholds = kDefaultBadPixelThresholds);

/// JSON object with every real rounded to 6 significant digits.
std::string to_json(const MetricReport& report, int indent = 2);
std::string to_json(const AlignmentParams& params, int indent = 2);

}  // namespace depthkit
