#pragma once

#include <vector>

#include "crackscan/planner.hpp"
#include "crackscan/raster.hpp"

namespace crackscan {

struct DetectionMetrics {
  double pixacc = 0.0;  // correctly classified pixels / total pixels
  double iou = 0.0;     // crack-class intersection over union
};

struct ReconMetrics {
  double mean_d_mm = 0.0;
  double sd_mm = 0.0;  // population standard deviation
  double max_d_mm = 0.0;
  double time_s = 0.0;
  int n_touches = 0;
};

/// Overall pixel accuracy. Throws std::invalid_argument on size mismatch.
double pixacc(const RasterImage& pred, const RasterImage& gt);

/// Crack-class IoU; defined as 1.0 when both masks are empty.
double iou(const RasterImage& pred, const RasterImage& gt);

DetectionMetrics detection_metrics(const RasterImage& pred, const RasterImage& gt);

/// Shortest distance from each point to the truth polyline set, aggregated as
/// mean / population SD / max. Distances run one way, reconstruction to
/// truth; symmetric=true also measures truth vertices against the points
/// (Chamfer style). Throws std::invalid_argument when points is empty.
ReconMetrics distance_metrics(const std::vector<Point3>& points,
                              const std::vector<std::vector<Point3>>& truth_polylines,
                              bool symmetric = false);

/// Collection-time model: touches * per_touch_s plus tour length (plan order)
/// at the travel speed.
double timing_model(const TouchPlan& plan, double per_touch_s, double travel_mm_per_s);

double tour_length_mm(const TouchPlan& plan);

}  // namespace crackscan
