#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depthkit/grid.hpp"
#include "depthkit/rng.hpp"

namespace depthkit {

struct ExperimentCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;

  /// Throws kInvalidArgument unless x is strictly monotone and every y finite.
  void validate() const;
};

/// Depth-space vs disparity-space alignment under growing Gaussian noise.
struct RobustnessConfig {
  int n = 500;
  double max_disturbance = 1.8;
  double step = 0.05;
  /// Noise standard deviation per unit of disturbance.
  double noise_scale = 0.01;
  std::uint64_t seed = 0;
  /// Worker threads for the disturbance levels; output does not depend on it.
  int threads = 1;

  void validate() const;
  std::vector<double> disturbances() const;
};

struct RobustnessResult {
  ExperimentCurve depth;      // delta1 after depth-space alignment
  ExperimentCurve disparity;  // delta1 after disparity-space alignment
};

RobustnessResult run_robustness(const RobustnessConfig& cfg);

enum class AlignMode { kNone, kLsq, kRansac };

std::string_view to_string(AlignMode mode);
AlignMode parse_align_mode(std::string_view text);

/// A shrinking top-left block of the prediction is perturbed by
/// E * n^2 / m^2 with E ~ U[0, 1]; the prediction is otherwise exact.
struct SensitivityConfig {
  int n = 500;
  /// Block sizes, strictly descending. Empty means n, n - 10, ..., down to 1..10.
  std::vector<int> sizes;
  std::vector<AlignMode> align_modes{AlignMode::kNone, AlignMode::kLsq, AlignMode::kRansac};
  std::uint64_t seed = 0;
  /// Upper bound of E; 0 turns the perturbation off.
  double error_amplitude = 1.0;
  /// RANSAC inlier bound relative to |gt|. 0.2 = 1 - 1/1.25 matches the
  /// tolerance of the delta metric itself.
  double ransac_threshold = 0.2;
  int ransac_iterations = 256;
  int threads = 1;

  void validate() const;
  std::vector<int> effective_sizes() const;
};

std::vector<int> default_sizes(int n);

struct SensitivityResult {
  std::map<AlignMode, ExperimentCurve> delta;
  std::map<AlignMode, ExperimentCurve> abs_rel;

  /// delta curves then abs_rel curves, in align_modes order.
  std::vector<ExperimentCurve> curves(const std::vector<AlignMode>& order) const;
};

SensitivityResult run_sensitivity(const SensitivityConfig& cfg);

/// Copy of a square `base` whose top-left m x m block gains
/// amplitude * U[0, 1) * n^2 / m^2 per pixel, drawn row-major from `rng`.
DepthGrid perturb_top_left(const DepthGrid& base, std::size_t m, double amplitude, Rng& rng);

enum class CurveFormat { kCsv, kSvg };

/// CSV with header "x,<label>,..."; all curves must share the same x values.
std::string curves_to_csv(const std::vector<ExperimentCurve>& curves);
/// Self-contained SVG line chart, 800x600 viewBox, one polyline per curve.
std::string curves_to_svg(const std::vector<ExperimentCurve>& curves,
                          std::string_view title = {});
void emit_curves(const std::vector<ExperimentCurve>& curves, const std::filesystem::path& path,
                 CurveFormat format);

}  // namespace depthkit
