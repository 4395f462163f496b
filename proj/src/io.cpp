#include "depthkit/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "depthkit/error.hpp"

namespace depthkit {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

float byteswap(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, sizeof u);
  u = ((u & 0x000000ffu) << 24) | ((u & 0x0000ff00u) << 8) | ((u & 0x00ff0000u) >> 8) |
      ((u & 0xff000000u) >> 24);
  std::memcpy(&f, &u, sizeof f);
  return f;
}

struct PfmRaw {
  std::size_t width;
  std::size_t height;
  int channels;
  std::vector<float> top_down;  // rows reordered top to bottom, channels interleaved
};

PfmRaw read_pfm_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());

  std::string magic;
  long long w = 0;
  long long h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in) fail(ErrorCode::kParseError, path.string() + ": malformed PFM header");
  int channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    fail(ErrorCode::kParseError, path.string() + ": not a PFM file");
  }
  if (w <= 0 || h <= 0) fail(ErrorCode::kParseError, path.string() + ": bad PFM dimensions");
  if (scale == 0.0) fail(ErrorCode::kParseError, path.string() + ": PFM scale must be nonzero");
  // Exactly one whitespace byte separates the header from the raster.
  in.get();

  const auto width = static_cast<std::size_t>(w);
  const auto height = static_cast<std::size_t>(h);
  const std::size_t row_len = width * static_cast<std::size_t>(channels);
  std::vector<float> raw(row_len * height);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(float))) {
    fail(ErrorCode::kParseError, path.string() + ": truncated PFM raster");
  }

  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little) {
    for (auto& f : raw) f = byteswap(f);
  }

  PfmRaw out{width, height, channels, std::vector<float>(raw.size())};
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t src = (height - 1 - row) * row_len;
    std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(src), row_len,
                out.top_down.begin() + static_cast<std::ptrdiff_t>(row * row_len));
  }
  return out;
}

void write_pfm_raw(const std::filesystem::path& path, std::size_t width, std::size_t height,
                   int channels, const std::vector<float>& top_down) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  const double scale = std::endian::native == std::endian::little ? -1.0 : 1.0;
  out << (channels == 1 ? "Pf" : "PF") << '\n'
      << width << ' ' << height << '\n'
      << (scale < 0 ? "-1.0" : "1.0") << '\n';
  const std::size_t row_len = width * static_cast<std::size_t>(channels);
  for (std::size_t row = height; row-- > 0;) {
    out.write(reinterpret_cast<const char*>(top_down.data() + row * row_len),
              static_cast<std::streamsize>(row_len * sizeof(float)));
  }
  if (!out) fail(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace

GridFile read_pfm(const std::filesystem::path& path, GridKind kind) {
  PfmRaw raw = read_pfm_raw(path);
  if (raw.channels != 1) {
    fail(ErrorCode::kParseError, path.string() + ": expected a single-channel PFM");
  }
  std::vector<double> values(raw.top_down.begin(), raw.top_down.end());
  DepthGrid grid(raw.width, raw.height, std::move(values), kind);
  ValidityMask mask = finite_mask(grid);
  return {std::move(grid), std::move(mask)};
}

void write_pfm(const std::filesystem::path& path, const DepthGrid& grid,
               const ValidityMask* mask) {
  if (mask && !mask->matches(grid)) fail(ErrorCode::kInvalidArgument, "mask/grid mismatch");
  std::vector<float> data(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    data[i] = (mask && !(*mask)[i]) ? std::numeric_limits<float>::quiet_NaN()
                                    : static_cast<float>(grid[i]);
  }
  write_pfm_raw(path, grid.width(), grid.height(), 1, data);
}

PointMap read_pfm_pointmap(const std::filesystem::path& path) {
  PfmRaw raw = read_pfm_raw(path);
  if (raw.channels != 3) {
    fail(ErrorCode::kParseError, path.string() + ": expected a three-channel PFM");
  }
  return PointMap(raw.width, raw.height,
                  std::vector<double>(raw.top_down.begin(), raw.top_down.end()));
}

void write_pfm_pointmap(const std::filesystem::path& path, const PointMap& pm) {
  const auto xyz = pm.xyz();
  write_pfm_raw(path, pm.width(), pm.height(), 3, std::vector<float>(xyz.begin(), xyz.end()));
}

GridFile parse_grid_csv(const std::string& text, GridKind kind) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  std::vector<std::uint8_t> bits;
  std::size_t width = 0;
  std::size_t height = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::size_t cols = 0;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      cell = trim(cell);
      ++cols;
      if (lower(cell) == "nan") {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        bits.push_back(0);
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        fail(ErrorCode::kParseError, "bad CSV cell '" + cell + "' on row " +
                                         std::to_string(height + 1));
      }
      values.push_back(v);
      bits.push_back(std::isfinite(v) ? 1 : 0);
    }
    if (width == 0) {
      width = cols;
    } else if (cols != width) {
      fail(ErrorCode::kParseError, "ragged CSV grid at row " + std::to_string(height + 1));
    }
    ++height;
  }
  if (width == 0 || height == 0) fail(ErrorCode::kParseError, "empty CSV grid");
  return {DepthGrid(width, height, std::move(values), kind),
          ValidityMask(width, height, std::move(bits))};
}

std::string format_grid_csv(const DepthGrid& grid, const ValidityMask* mask) {
  if (mask && !mask->matches(grid)) fail(ErrorCode::kInvalidArgument, "mask/grid mismatch");
  std::string out;
  char buf[40];
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      const std::size_t i = y * grid.width() + x;
      if (x > 0) out += ',';
      const double v = grid[i];
      if ((mask && !(*mask)[i]) || std::isnan(v)) {
        out += "nan";
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

GridFile read_grid_csv(const std::filesystem::path& path, GridKind kind) {
  return parse_grid_csv(read_text_file(path), kind);
}

void write_grid_csv(const std::filesystem::path& path, const DepthGrid& grid,
                    const ValidityMask* mask) {
  write_text_file(path, format_grid_csv(grid, mask));
}

GridFile read_grid(const std::filesystem::path& path, GridKind kind) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".pfm") return read_pfm(path, kind);
  if (ext == ".csv") return read_grid_csv(path, kind);
  fail(ErrorCode::kInvalidArgument, "unsupported grid format: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace depthkit
