#pragma once

#include <filesystem>
#include <string>

#include "depthkit/align.hpp"
#include "depthkit/grid.hpp"

namespace depthkit {

/// A grid read from disk plus the mask of its finite pixels.
struct GridFile {
  DepthGrid grid;
  ValidityMask mask;
};

// PFM: "Pf" (1 channel) or "PF" (3 channels), width height, scale line
// (negative means little-endian), then float32 rows from bottom to top.
// Values widen to double on read and narrow to float on write.

GridFile read_pfm(const std::filesystem::path& path, GridKind kind = GridKind::kGeneric);
/// Invalid pixels are written as NaN. Always little-endian.
void write_pfm(const std::filesystem::path& path, const DepthGrid& grid,
               const ValidityMask* mask = nullptr);

PointMap read_pfm_pointmap(const std::filesystem::path& path);
void write_pfm_pointmap(const std::filesystem::path& path, const PointMap& pm);

/// CSV: one line per grid row, "nan" marks an invalid pixel.
GridFile parse_grid_csv(const std::string& text, GridKind kind = GridKind::kGeneric);
std::string format_grid_csv(const DepthGrid& grid, const ValidityMask* mask = nullptr);

GridFile read_grid_csv(const std::filesystem::path& path, GridKind kind = GridKind::kGeneric);
void write_grid_csv(const std::filesystem::path& path, const DepthGrid& grid,
                    const ValidityMask* mask = nullptr);

/// Dispatches on the extension (.pfm or .csv).
GridFile read_grid(const std::filesystem::path& path, GridKind kind = GridKind::kGeneric);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace depthkit
