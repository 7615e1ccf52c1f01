#include "crackscan/segmentation.hpp"

#include <stdexcept>

namespace crackscan {

namespace {

// True when every mask pixel within the square window of the given radius
// around (row, col) is set. Pixels outside the raster count as unset.
bool window_all_set(const RasterImage& mask, int row, int col, int radius) {
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const int r = row + dr;
      const int c = col + dc;
      if (!mask.in_bounds(r, c) || !mask.on(r, c)) return false;
    }
  }
  return true;
}

bool window_any_set(const RasterImage& mask, int row, int col, int radius) {
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const int r = row + dr;
      const int c = col + dc;
      if (mask.in_bounds(r, c) && mask.on(r, c)) return true;
    }
  }
  return false;
}

}  // namespace

void SegmenterConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("segmenter threshold must be in [0, 1]");
  if (open_radius < 0 || close_radius < 0)
    throw std::invalid_argument("segmenter morphology radii must be >= 0");
}

RasterImage erode(const RasterImage& mask, int radius) {
  if (radius <= 0) return mask;
  RasterImage out = mask;
  for (int row = 0; row < mask.height; ++row)
    for (int col = 0; col < mask.width; ++col)
      out.at(row, col) = window_all_set(mask, row, col, radius) ? 1.0 : 0.0;
  return out;
}

RasterImage dilate(const RasterImage& mask, int radius) {
  if (radius <= 0) return mask;
  RasterImage out = mask;
  for (int row = 0; row < mask.height; ++row)
    for (int col = 0; col < mask.width; ++col)
      out.at(row, col) = window_any_set(mask, row, col, radius) ? 1.0 : 0.0;
  return out;
}

RasterImage morph_open(const RasterImage& mask, int radius) {
  return dilate(erode(mask, radius), radius);
}

RasterImage morph_close(const RasterImage& mask, int radius) {
  return erode(dilate(mask, radius), radius);
}

RasterImage segment_baseline(const RasterImage& image, const SegmenterConfig& cfg) {
  cfg.validate();
  if (image.channels == Channels::binary) return image;

  RasterImage mask = image;
  mask.channels = Channels::binary;
  for (double& v : mask.pixels) v = v < cfg.threshold ? 1.0 : 0.0;
  mask = morph_open(mask, cfg.open_radius);
  mask = morph_close(mask, cfg.close_radius);
  return mask;
}

RasterImage load_mask(const std::string& path) {
  RasterImage img = load_raster(path);
  if (img.channels != Channels::binary)
    throw std::runtime_error("raster is not a binary mask: " + path);
  return img;
}

void save_mask(const RasterImage& mask, const std::string& path) {
  if (mask.channels != Channels::binary)
    throw std::invalid_argument("save_mask expects a binary raster");
  save_raster(mask, path);
}

void to_json(nlohmann::json& j, const SegmenterConfig& c) {
  j = nlohmann::json{{"threshold", c.threshold},
                     {"open_radius", c.open_radius},
                     {"close_radius", c.close_radius}};
}

void from_json(const nlohmann::json& j, SegmenterConfig& c) {
  SegmenterConfig defaults;
  c.threshold = j.value("threshold", defaults.threshold);
  c.open_radius = j.value("open_radius", defaults.open_radius);
  c.close_radius = j.value("close_radius", defaults.close_radius);
}

}  // namespace crackscan
