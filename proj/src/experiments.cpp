#include "depthkit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "depthkit/align.hpp"
#include "depthkit/error.hpp"
#include "depthkit/metrics.hpp"
#include "depthkit/rng.hpp"

namespace depthkit {

namespace {

// Stream reserved for the ground-truth matrices; level k draws from stream k.
constexpr std::uint64_t kBaseStream = ~std::uint64_t{0};

/// Runs fn(k) for k in [0, count) on up to `threads` workers. Results must be
/// written to per-k slots so the output is independent of scheduling.
template <typename Fn>
void parallel_levels(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
  if (workers == 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> positive_uniform_matrix(std::size_t count, double hi, RngSpec spec) {
  Rng rng(spec);
  std::vector<double> v(count);
  for (auto& x : v) x = positive_uniform_draw(rng, hi);
  return v;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace

void ExperimentCurve::validate() const {
  for (const auto& [x, y] : points) {
    require(std::isfinite(x) && std::isfinite(y), label + ": non-finite point");
  }
  if (points.size() < 2) return;
  const bool ascending = points[1].first > points[0].first;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = points[i].first - points[i - 1].first;
    require(ascending ? dx > 0.0 : dx < 0.0, label + ": x is not strictly monotone");
  }
}

void RobustnessConfig::validate() const {
  require(n >= 2, "n must be at least 2");
  require(std::isfinite(step) && step > 0.0, "step must be positive");
  require(std::isfinite(max_disturbance) && max_disturbance >= 0.0,
          "max disturbance must be non-negative");
  require(std::isfinite(noise_scale) && noise_scale >= 0.0,
          "noise scale must be non-negative");
  require(max_disturbance / step < 1e6, "too many disturbance levels");
  require(threads >= 1, "threads must be >= 1");
}

std::vector<double> RobustnessConfig::disturbances() const {
  const auto levels = static_cast<std::size_t>(std::floor(max_disturbance / step + 1e-9)) + 1;
  std::vector<double> d(levels);
  for (std::size_t k = 0; k < levels; ++k) d[k] = static_cast<double>(k) * step;
  return d;
}

RobustnessResult run_robustness(const RobustnessConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n);
  const std::size_t pixels = n * n;

  const DepthGrid gt(n, n, positive_uniform_matrix(pixels, 10.0, {cfg.seed, kBaseStream}),
                     GridKind::kDepth);
  const auto [gt_disp, disp_mask] = invert_grid(gt);
  const ValidityMask full(n, n);

  const std::vector<double> levels = cfg.disturbances();
  std::vector<double> delta_depth(levels.size());
  std::vector<double> delta_disp(levels.size());

  const AlignSpec depth_spec{Solver::kLsqScaleShift, AlignSpace::kDepth, std::nullopt};
  const AlignSpec disp_spec{Solver::kLsqScaleShift, AlignSpace::kDisparity, std::nullopt};

  parallel_levels(levels.size(), cfg.threads, [&](std::size_t k) {
    Rng rng({cfg.seed, k});
    const double sigma = levels[k] * cfg.noise_scale;
    std::vector<double> pred_depth(pixels);
    std::vector<double> pred_disp(pixels);
    for (std::size_t i = 0; i < pixels; ++i) {
      const double e = gaussian_draw(rng, sigma);
      pred_depth[i] = gt[i] + e;
      pred_disp[i] = gt_disp[i] + e;
    }

    const auto a1 = align_prediction(DepthGrid(n, n, std::move(pred_depth), GridKind::kDepth),
                                     gt, Representation::kAffineInvariantDepth, depth_spec, full);
    delta_depth[k] = delta_accuracy(a1.depth, gt, a1.mask);

    const auto a2 =
        align_prediction(DepthGrid(n, n, std::move(pred_disp), GridKind::kDisparity), gt,
                         Representation::kAffineInvariantDisparity, disp_spec, full);
    delta_disp[k] = delta_accuracy(a2.depth, gt, a2.mask);
  });

  RobustnessResult result{{"delta1_depth", {}}, {"delta1_disparity", {}}};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    result.depth.points.emplace_back(levels[k], delta_depth[k]);
    result.disparity.points.emplace_back(levels[k], delta_disp[k]);
  }
  return result;
}

std::string_view to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::kNone: return "none";
    case AlignMode::kLsq: return "lsq";
    case AlignMode::kRansac: return "ransac";
  }
  return "none";
}

AlignMode parse_align_mode(std::string_view text) {
  if (text == "none") return AlignMode::kNone;
  if (text == "lsq") return AlignMode::kLsq;
  if (text == "ransac") return AlignMode::kRansac;
  fail(ErrorCode::kInvalidArgument, "unknown align mode '" + std::string(text) + "'");
}

std::vector<int> default_sizes(int n) {
  std::vector<int> sizes;
  for (int m = n; m > 0; m -= 10) sizes.push_back(m);
  return sizes;
}

void SensitivityConfig::validate() const {
  require(n >= 2, "n must be at least 2");
  const auto s = effective_sizes();
  require(!s.empty(), "sizes must not be empty");
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(s[i] >= 1 && s[i] <= n, "every size must lie in [1, n]");
    if (i > 0) require(s[i] < s[i - 1], "sizes must be strictly descending");
  }
  require(!align_modes.empty(), "at least one align mode is required");
  for (std::size_t i = 0; i < align_modes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      require(align_modes[i] != align_modes[j], "align modes must be distinct");
    }
  }
  require(std::isfinite(error_amplitude) && error_amplitude >= 0.0,
          "error amplitude must be non-negative");
  RansacConfig{ransac_iterations, 2, ransac_threshold, 0}.validate();
  require(threads >= 1, "threads must be >= 1");
}

std::vector<int> SensitivityConfig::effective_sizes() const {
  return sizes.empty() ? default_sizes(n) : sizes;
}

std::vector<ExperimentCurve> SensitivityResult::curves(
    const std::vector<AlignMode>& order) const {
  std::vector<ExperimentCurve> out;
  for (const auto m : order) out.push_back(delta.at(m));
  for (const auto m : order) out.push_back(abs_rel.at(m));
  return out;
}

DepthGrid perturb_top_left(const DepthGrid& base, std::size_t m, double amplitude, Rng& rng) {
  const std::size_t n = base.width();
  require(base.height() == n, "perturbation expects a square grid");
  require(m >= 1 && m <= n, "block size must lie in [1, n]");
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double gain = nn / (static_cast<double>(m) * static_cast<double>(m));

  const auto v = base.values();
  std::vector<double> pred(v.begin(), v.end());
  for (std::size_t row = 0; row < m; ++row) {
    for (std::size_t col = 0; col < m; ++col) {
      pred[row * n + col] += amplitude * rng.uniform01() * gain;
    }
  }
  return DepthGrid(n, n, std::move(pred), base.kind());
}

SensitivityResult run_sensitivity(const SensitivityConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n);
  const std::size_t pixels = n * n;
  const std::vector<int> sizes = cfg.effective_sizes();

  const DepthGrid gt(n, n, positive_uniform_matrix(pixels, 10.0, {cfg.seed, kBaseStream}),
                     GridKind::kDepth);
  const ValidityMask full(n, n);

  struct LevelResult {
    std::map<AlignMode, std::pair<double, double>> by_mode;  // (delta, abs_rel)
  };
  std::vector<LevelResult> results(sizes.size());

  parallel_levels(sizes.size(), cfg.threads, [&](std::size_t k) {
    Rng rng({cfg.seed, k});
    const DepthGrid pred_grid =
        perturb_top_left(gt, static_cast<std::size_t>(sizes[k]), cfg.error_amplitude, rng);

    for (const auto mode : cfg.align_modes) {
      AlignSpec spec;
      Representation repr = Representation::kAffineInvariantDepth;
      switch (mode) {
        case AlignMode::kNone:
          spec.solver = Solver::kNone;
          repr = Representation::kMetricDepth;
          break;
        case AlignMode::kLsq:
          spec.solver = Solver::kLsqScaleShift;
          break;
        case AlignMode::kRansac:
          spec.solver = Solver::kRansacScaleShift;
          spec.ransac = RansacConfig{cfg.ransac_iterations, 2, cfg.ransac_threshold,
                                     splitmix64(cfg.seed ^ splitmix64(k))};
          break;
      }
      const auto aligned = align_prediction(pred_grid, gt, repr, spec, full);
      results[k].by_mode[mode] = {delta_accuracy(aligned.depth, gt, aligned.mask),
                                  abs_rel(aligned.depth, gt, aligned.mask)};
    }
  });

  SensitivityResult out;
  for (const auto mode : cfg.align_modes) {
    ExperimentCurve d{"delta_" + std::string(to_string(mode)), {}};
    ExperimentCurve a{"absrel_" + std::string(to_string(mode)), {}};
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const auto [delta, rel] = results[k].by_mode.at(mode);
      d.points.emplace_back(sizes[k], delta);
      a.points.emplace_back(sizes[k], rel);
    }
    out.delta[mode] = std::move(d);
    out.abs_rel[mode] = std::move(a);
  }
  return out;
}

}  // namespace depthkit
