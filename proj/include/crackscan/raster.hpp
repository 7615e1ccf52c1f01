#pragma once

#include <string>
#include <vector>

#include "crackscan/geometry.hpp"

namespace crackscan {

enum class Channels { grayscale, binary };

std::string to_string(Channels c);
Channels channels_from_string(const std::string& s);

/// Integer raster coordinate. Ordering is lexicographic by (row, col), which
/// is the tie-break order used everywhere a deterministic pixel order matters.
struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Row-major single-channel image with a physical placement: pixel (row, col)
/// is centred at origin + (col, row) * scale_mm_per_px in the world x/y plane.
/// Binary rasters hold exactly 0.0 or 1.0; grayscale rasters hold albedo in
/// [0, 1] or depth values in mm depending on use.
struct RasterImage {
  int width = 0;
  int height = 0;
  Channels channels = Channels::grayscale;
  std::vector<double> pixels;
  double scale_mm_per_px = 1.0;
  Point3 origin;  // world position of pixel (0, 0)

  static RasterImage make(int width, int height, Channels ch, double fill = 0.0);

  double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }
  bool on(int row, int col) const { return at(row, col) != 0.0; }

  std::size_t size() const { return pixels.size(); }
  std::size_t count_nonzero() const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

// Raster files are raw (P5) PGM next to a JSON sidecar "<path>.json" holding
// channels, mm-per-pixel scale, origin and the stored value range. Binary
// rasters are written 8-bit and round-trip bit exact; grayscale rasters are
// written 16-bit against the sidecar's value range.
void save_raster(const RasterImage& img, const std::string& path);

/// Throws ParseError (with byte offset) for malformed PGM data and
/// std::runtime_error naming the sidecar when it is missing.
RasterImage load_raster(const std::string& path);

}  // namespace crackscan
