#pragma once

#include <string>

#include "crackscan/raster.hpp"

namespace crackscan {

/// Classical crack segmenter settings. Any producer of binary crack masks can
/// stand in for segment_baseline; masks enter the pipeline through load_mask.
struct SegmenterConfig {
  double threshold = 0.5;  // crack iff intensity < threshold
  int open_radius = 0;     // square structuring element radius, px
  int close_radius = 0;

  void validate() const;
};

/// Threshold-and-morphology crack segmentation: a pixel is crack when its
/// intensity is below the threshold; the mask is then opened and closed with
/// square structuring elements. Binary input is already a mask and is
/// returned unchanged.
RasterImage segment_baseline(const RasterImage& image, const SegmenterConfig& cfg);

// Square-element binary morphology, exposed for reuse and tests.
RasterImage erode(const RasterImage& mask, int radius);
RasterImage dilate(const RasterImage& mask, int radius);
RasterImage morph_open(const RasterImage& mask, int radius);
RasterImage morph_close(const RasterImage& mask, int radius);

/// Loads a binary mask raster; throws when the file is not binary.
RasterImage load_mask(const std::string& path);
void save_mask(const RasterImage& mask, const std::string& path);

void to_json(nlohmann::json& j, const SegmenterConfig& c);
void from_json(const nlohmann::json& j, SegmenterConfig& c);

}  // namespace crackscan
