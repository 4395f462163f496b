#include "depthkit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "depthkit/align.hpp"
#include "depthkit/bench.hpp"
#include "depthkit/error.hpp"
#include "depthkit/experiments.hpp"
#include "depthkit/io.hpp"
#include "depthkit/metrics.hpp"

namespace depthkit {

namespace {

struct EvalOptions {
  std::string pred;
  std::string gt;
  std::string mask;
  std::string repr = "metric";
  std::string align = "none";
  std::string space = "auto";
  std::uint64_t ransac_seed = 0;
  int ransac_iters = 256;
  double ransac_threshold = 0.05;
  std::optional<double> fx, fy, cx, cy;
  std::string out;
};

struct ExperimentOptions {
  std::string kind;
  int n = 500;
  double max_disturbance = 1.8;
  double step = 0.05;
  double noise_scale = 0.01;
  std::string sizes;
  std::string align = "none,lsq,ransac";
  double ransac_threshold = 0.2;
  int ransac_iters = 256;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string svg;
};

struct BenchOptions {
  std::vector<std::string> tables;
  std::string baseline;
  std::string format = "md";
  std::string out;
};

std::string fmt(double v, const char* f = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// "a:b:step" -> a, a - step, ..., down to >= b.
std::vector<int> parse_sizes(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) fail(ErrorCode::kInvalidArgument, "--sizes expects a:b:step");
  int v[3];
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      v[i] = std::stoi(parts[static_cast<std::size_t>(i)], &used);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "--sizes: '" + parts[static_cast<std::size_t>(i)] +
                                            "' is not an integer");
    }
    if (used != parts[static_cast<std::size_t>(i)].size()) {
      fail(ErrorCode::kInvalidArgument, "--sizes: trailing characters");
    }
  }
  const auto [from, to, step] = std::tuple{v[0], v[1], v[2]};
  if (step <= 0 || to < 1 || from < to) {
    fail(ErrorCode::kInvalidArgument, "--sizes needs from >= to >= 1 and step > 0");
  }
  std::vector<int> sizes;
  for (int m = from; m >= to; m -= step) sizes.push_back(m);
  return sizes;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDegeneratePrediction:
    case ErrorCode::kInsufficientData:
    case ErrorCode::kDegenerateBaseline:
      return kExitDegenerate;
    default:
      return kExitInvalidInput;
  }
}

ValidityMask mask_from_file(const std::string& path, std::size_t w, std::size_t h) {
  const GridFile f = read_grid(path);
  if (f.grid.width() != w || f.grid.height() != h) {
    fail(ErrorCode::kInvalidArgument, "mask dimensions differ from ground truth");
  }
  std::vector<std::uint8_t> bits(f.grid.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = (f.mask[i] && f.grid[i] != 0.0) ? 1 : 0;
  }
  return ValidityMask(w, h, std::move(bits));
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  static const std::map<std::string, Representation> kReprs{
      {"metric", Representation::kMetricDepth},
      {"affine-depth", Representation::kAffineInvariantDepth},
      {"affine-disparity", Representation::kAffineInvariantDisparity},
      {"pointmap", Representation::kAffineInvariantPointMap}};
  static const std::map<std::string, Solver> kSolvers{
      {"none", Solver::kNone},
      {"lsq", Solver::kLsqScaleShift},
      {"median", Solver::kMedianScaleOnly},
      {"ransac", Solver::kRansacScaleShift}};

  const Representation repr = kReprs.at(o.repr);
  AlignSpec spec;
  spec.solver = kSolvers.at(o.align);
  if (o.space == "auto") {
    spec.space = repr == Representation::kAffineInvariantDisparity ? AlignSpace::kDisparity
                                                                    : AlignSpace::kDepth;
  } else {
    spec.space = o.space == "disparity" ? AlignSpace::kDisparity : AlignSpace::kDepth;
  }
  if (spec.solver == Solver::kRansacScaleShift) {
    spec.ransac = RansacConfig{o.ransac_iters, 2, o.ransac_threshold, o.ransac_seed};
    spec.ransac->validate();
  }

  const GridFile gt = read_grid(o.gt, GridKind::kDepth);
  std::vector<std::uint8_t> gt_bits(gt.grid.size());
  for (std::size_t i = 0; i < gt_bits.size(); ++i) {
    gt_bits[i] = (gt.mask[i] && gt.grid[i] > 0.0) ? 1 : 0;
  }
  ValidityMask mask(gt.grid.width(), gt.grid.height(), std::move(gt_bits));
  if (!o.mask.empty()) {
    mask = intersect_masks(mask, mask_from_file(o.mask, gt.grid.width(), gt.grid.height()));
  }

  std::optional<Prediction> pred;
  std::optional<CameraIntrinsics> intr;
  if (repr == Representation::kAffineInvariantPointMap) {
    if (!o.fx || !o.fy || !o.cx || !o.cy) {
      fail(ErrorCode::kInvalidArgument, "--repr pointmap needs --fx --fy --cx --cy");
    }
    intr = CameraIntrinsics{*o.fx, *o.fy, *o.cx, *o.cy};
    intr->validate();
    PointMap pm = read_pfm_pointmap(o.pred);
    if (pm.width() != gt.grid.width() || pm.height() != gt.grid.height()) {
      fail(ErrorCode::kInvalidArgument,
           "dimension mismatch: prediction " + std::to_string(pm.width()) + "x" +
               std::to_string(pm.height()) + " vs ground truth " +
               std::to_string(gt.grid.width()) + "x" + std::to_string(gt.grid.height()));
    }
    std::vector<std::uint8_t> bits(pm.pixels());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      bits[i] = std::isfinite(pm.x(i)) && std::isfinite(pm.y(i)) && std::isfinite(pm.z(i));
    }
    mask = intersect_masks(mask, ValidityMask(pm.width(), pm.height(), std::move(bits)));
    pred = std::move(pm);
  } else {
    const GridKind kind = repr == Representation::kAffineInvariantDisparity
                              ? GridKind::kDisparity
                              : GridKind::kDepth;
    GridFile p = read_grid(o.pred, kind);
    if (!p.grid.same_shape(gt.grid)) {
      fail(ErrorCode::kInvalidArgument,
           "dimension mismatch: prediction " + std::to_string(p.grid.width()) + "x" +
               std::to_string(p.grid.height()) + " vs ground truth " +
               std::to_string(gt.grid.width()) + "x" + std::to_string(gt.grid.height()));
    }
    mask = intersect_masks(mask, p.mask);
    pred = std::move(p.grid);
  }

  const Evaluation ev = evaluate(*pred, gt.grid, repr, spec, mask, intr);

  nlohmann::ordered_json j;
  j["representation"] = std::string(to_string(repr));
  j["solver"] = std::string(to_string(spec.solver));
  j["alignment"] = nlohmann::ordered_json::parse(to_json(ev.alignment.params));
  if (ev.alignment.pointmap_shift) j["pointmap_shift"] = *ev.alignment.pointmap_shift;
  j["metrics"] = nlohmann::ordered_json::parse(to_json(ev.report));
  if (!o.out.empty()) write_text_file(o.out, j.dump(2) + "\n");

  out << "eval: delta1=" << fmt(ev.report.delta1) << " abs_rel=" << fmt(ev.report.abs_rel)
      << " rmse=" << fmt(ev.report.rmse) << " valid=" << ev.report.valid_count
      << " scale=" << fmt(ev.alignment.params.scale)
      << " shift=" << fmt(ev.alignment.params.shift) << " ("
      << to_string(ev.alignment.params.space) << ")\n";
  return kExitOk;
}

int cmd_experiment(const ExperimentOptions& o, std::ostream& out) {
  const std::string csv_path = o.out.empty() ? o.kind + ".csv" : o.out;
  std::vector<ExperimentCurve> curves;
  std::string summary;

  if (o.kind == "robustness") {
    RobustnessConfig cfg;
    cfg.n = o.n;
    cfg.max_disturbance = o.max_disturbance;
    cfg.step = o.step;
    cfg.noise_scale = o.noise_scale;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const RobustnessResult r = run_robustness(cfg);
    curves = {r.depth, r.disparity};
    summary = "robustness: " + std::to_string(r.depth.points.size()) + " levels, d=" +
              fmt(r.depth.points.back().first) +
              ": delta1 depth=" + fmt(r.depth.points.back().second) +
              " disparity=" + fmt(r.disparity.points.back().second);
  } else {
    SensitivityConfig cfg;
    cfg.n = o.n;
    cfg.sizes = o.sizes.empty() ? default_sizes(o.n) : parse_sizes(o.sizes);
    cfg.align_modes.clear();
    for (const auto& m : split_list(o.align)) cfg.align_modes.push_back(parse_align_mode(m));
    cfg.seed = o.seed;
    cfg.ransac_threshold = o.ransac_threshold;
    cfg.ransac_iterations = o.ransac_iters;
    cfg.threads = o.threads;
    const SensitivityResult r = run_sensitivity(cfg);
    curves = r.curves(cfg.align_modes);
    summary = "sensitivity: " + std::to_string(cfg.sizes.size()) + " sizes, m=" +
              std::to_string(cfg.sizes.back()) + ":";
    for (const auto mode : cfg.align_modes) {
      summary += " delta_" + std::string(to_string(mode)) + "=" +
                 fmt(r.delta.at(mode).points.back().second);
    }
  }

  emit_curves(curves, csv_path, CurveFormat::kCsv);
  if (!o.svg.empty()) emit_curves(curves, o.svg, CurveFormat::kSvg);
  out << summary << " -> " << csv_path << "\n";
  return kExitOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  std::vector<ResultTable> tables;
  for (const auto& path : o.tables) tables.push_back(load_table(path, o.baseline));
  const RankReport report = average_rank(tables);
  const std::string text =
      emit_report(report, o.format == "json" ? ReportFormat::kJson : ReportFormat::kMarkdown);
  if (o.out.empty()) {
    out << text;
    return kExitOk;
  }
  write_text_file(o.out, text);

  std::string best;
  double best_rank = 0.0;
  for (const auto& [name, r] : report.average_rank) {
    if (best.empty() || r < best_rank) {
      best = name;
      best_rank = r;
    }
  }
  out << "bench: " << tables.size() << " tasks, " << report.average_rank.size()
      << " ranked methods, best " << best << " (" << fmt(best_rank, "%.2f") << ") -> " << o.out
      << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth prediction evaluation: alignment, metrics, bias experiments, ranking"};
  app.name("depthkit");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  EvalOptions eval;
  auto* ev = app.add_subcommand("eval", "Align a prediction to ground truth and score it");
  ev->add_option("--pred", eval.pred, "Prediction file (.pfm or .csv; 3-channel .pfm for pointmap)")
      ->required();
  ev->add_option("--gt", eval.gt, "Ground-truth depth file (.pfm or .csv)")->required();
  ev->add_option("--mask", eval.mask, "Optional mask file; nonzero finite pixels are valid");
  ev->add_option("--repr", eval.repr, "Prediction representation")
      ->check(CLI::IsMember({"metric", "affine-depth", "affine-disparity", "pointmap"}));
  ev->add_option("--align", eval.align, "Alignment solver")
      ->check(CLI::IsMember({"none", "lsq", "median", "ransac"}));
  ev->add_option("--space", eval.space, "Alignment space (auto: disparity for affine-disparity)")
      ->check(CLI::IsMember({"auto", "depth", "disparity"}));
  ev->add_option("--ransac-seed", eval.ransac_seed, "RANSAC seed");
  ev->add_option("--ransac-iters", eval.ransac_iters, "RANSAC iterations");
  ev->add_option("--ransac-threshold", eval.ransac_threshold,
                 "RANSAC inlier bound relative to |target|");
  ev->add_option("--fx", eval.fx, "Focal length x (pointmap only)");
  ev->add_option("--fy", eval.fy, "Focal length y (pointmap only)");
  ev->add_option("--cx", eval.cx, "Principal point x (pointmap only)");
  ev->add_option("--cy", eval.cy, "Principal point y (pointmap only)");
  ev->add_option("--out", eval.out, "Report JSON path");

  ExperimentOptions exp;
  auto* ex = app.add_subcommand("experiment", "Run an alignment-bias experiment");
  ex->add_option("--kind", exp.kind, "Experiment kind")
      ->required()
      ->check(CLI::IsMember({"robustness", "sensitivity"}));
  ex->add_option("--n", exp.n, "Matrix size n");
  ex->add_option("--max-disturbance", exp.max_disturbance, "robustness: max disturbance factor");
  ex->add_option("--step", exp.step, "robustness: disturbance step");
  ex->add_option("--noise-scale", exp.noise_scale,
                 "robustness: noise std-dev per unit disturbance");
  ex->add_option("--sizes", exp.sizes, "sensitivity: block sizes a:b:step (default n:10:10)");
  ex->add_option("--align", exp.align, "sensitivity: comma-separated modes from none,lsq,ransac");
  ex->add_option("--ransac-threshold", exp.ransac_threshold,
                 "sensitivity: RANSAC inlier bound relative to |gt|");
  ex->add_option("--ransac-iters", exp.ransac_iters, "sensitivity: RANSAC iterations");
  ex->add_option("--seed", exp.seed, "Random seed");
  ex->add_option("--threads", exp.threads, "Worker threads (output is identical for any value)");
  ex->add_option("--out", exp.out, "Curve CSV path (default <kind>.csv)");
  ex->add_option("--svg", exp.svg, "Optional SVG chart path");

  BenchOptions bench;
  auto* bn = app.add_subcommand("bench", "Improvement ratios and ranks from result tables");
  bn->add_option("tables", bench.tables, "Result tables (.csv or .json)")->required();
  bn->add_option("--baseline", bench.baseline,
                 "Baseline method row (JSON tables may carry their own)");
  bn->add_option("--format", bench.format, "Report format")->check(CLI::IsMember({"json", "md"}));
  bn->add_option("--out", bench.out, "Report path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (ev->parsed()) return cmd_eval(eval, out);
    if (ex->parsed()) return cmd_experiment(exp, out);
    return cmd_bench(bench, out);
  } catch (const Error& e) {
    err << "depthkit: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace depthkit
