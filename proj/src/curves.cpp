#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "depthkit/error.hpp"
#include "depthkit/experiments.hpp"
#include "depthkit/io.hpp"

namespace depthkit {

namespace {

std::string num(double v, const char* fmt = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_curves(const std::vector<ExperimentCurve>& curves) {
  if (curves.empty()) fail(ErrorCode::kInvalidArgument, "no curves to emit");
  for (const auto& c : curves) {
    c.validate();
    if (c.points.empty()) fail(ErrorCode::kInvalidArgument, c.label + ": curve has no points");
  }
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string curves_to_csv(const std::vector<ExperimentCurve>& curves) {
  check_curves(curves);
  const auto& xs = curves.front().points;
  for (const auto& c : curves) {
    bool same = c.points.size() == xs.size();
    for (std::size_t i = 0; same && i < xs.size(); ++i) {
      same = c.points[i].first == xs[i].first;
    }
    if (!same) fail(ErrorCode::kInvalidArgument, c.label + ": x values differ between curves");
  }

  std::string out = "x";
  for (const auto& c : curves) out += "," + c.label;
  out += '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += num(xs[i].first);
    for (const auto& c : curves) out += "," + num(c.points[i].second);
    out += '\n';
  }
  return out;
}

std::string curves_to_svg(const std::vector<ExperimentCurve>& curves, std::string_view title) {
  check_curves(curves);
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 600.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 200.0;
  constexpr double kTop = 50.0;
  constexpr double kBottom = 60.0;

  double x_lo = curves.front().points.front().first;
  double x_hi = x_lo;
  double y_lo = curves.front().points.front().second;
  double y_hi = y_lo;
  for (const auto& c : curves) {
    for (const auto& [x, y] : c.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
         "width=\"800\" height=\"600\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += "  <text x=\"" + num(kLeft) + "\" y=\"30\" font-family=\"sans-serif\" "
           "font-size=\"18\">" + xml_escape(title) + "</text>\n";
  }
  // Axes box and tick labels at the extremes.
  svg += "  <rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const double base = kTop + plot_h;
  for (const double x : {x_lo, x_hi}) {
    svg += "  <text x=\"" + num(px(x), "%.2f") + "\" y=\"" + num(base + 20, "%.2f") +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
           num(x, "%.4g") + "</text>\n";
  }
  for (const double y : {y_lo, y_hi}) {
    svg += "  <text x=\"" + num(kLeft - 8, "%.2f") + "\" y=\"" + num(py(y) + 4, "%.2f") +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
           num(y, "%.4g") + "</text>\n";
  }

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    std::string pts;
    for (const auto& [x, y] : curves[c].points) {
      if (!pts.empty()) pts += ' ';
      pts += num(px(x), "%.2f") + "," + num(py(y), "%.2f");
    }
    svg += "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    const double ly = kTop + 20.0 * static_cast<double>(c) + 10.0;
    const double lx = kWidth - kRight + 20.0;
    svg += "  <line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 25) +
           "\" y2=\"" + num(ly) + "\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\"/>\n";
    svg += "  <text x=\"" + num(lx + 32) + "\" y=\"" + num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(curves[c].label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_curves(const std::vector<ExperimentCurve>& curves, const std::filesystem::path& path,
                 CurveFormat format) {
  const std::string text =
      format == CurveFormat::kCsv ? curves_to_csv(curves) : curves_to_svg(curves);
  write_text_file(path, text);
}

}  // namespace depthkit
