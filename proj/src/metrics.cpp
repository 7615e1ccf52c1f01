#include "crackscan/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crackscan {

namespace {

void require_same_size(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mask dimensions differ: " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                "x" + std::to_string(b.height));
}

double shortest_distance_to_polylines(const Point3& p,
                                      const std::vector<std::vector<Point3>>& polylines) {
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d q = p.vec();
  for (const auto& poly : polylines) {
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      best = std::min(best, point_segment_distance_3d(q, poly[i].vec(), poly[i + 1].vec()));
    }
  }
  return best;
}

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  double max = 0.0;
  std::size_t n = 0;

  void add(double d) {
    sum += d;
    sum_sq += d * d;
    max = std::max(max, d);
    ++n;
  }
};

}  // namespace

double pixacc(const RasterImage& pred, const RasterImage& gt) {
  require_same_size(pred, gt);
  if (pred.size() == 0) return 1.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((pred.pixels[i] != 0.0) == (gt.pixels[i] != 0.0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double iou(const RasterImage& pred, const RasterImage& gt) {
  require_same_size(pred, gt);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.pixels[i] != 0.0;
    const bool g = gt.pixels[i] != 0.0;
    if (p && g) ++inter;
    if (p || g) ++uni;
  }
  if (uni == 0) return 1.0;  // both empty
  return static_cast<double>(inter) / static_cast<double>(uni);
}

DetectionMetrics detection_metrics(const RasterImage& pred, const RasterImage& gt) {
  return {pixacc(pred, gt), iou(pred, gt)};
}

ReconMetrics distance_metrics(const std::vector<Point3>& points,
                              const std::vector<std::vector<Point3>>& truth_polylines,
                              bool symmetric) {
  if (points.empty())
    throw std::invalid_argument("no reconstruction: cannot score an empty profile");

  Accumulator acc;
  for (const auto& p : points) acc.add(shortest_distance_to_polylines(p, truth_polylines));
  if (symmetric) {
    // Chamfer-style reverse direction: truth vertices against the point set.
    for (const auto& poly : truth_polylines) {
      for (const auto& t : poly) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : points) {
          const double d = (t.vec() - p.vec()).norm();
          best = std::min(best, d);
        }
        acc.add(best);
      }
    }
  }

  ReconMetrics m;
  m.mean_d_mm = acc.sum / static_cast<double>(acc.n);
  const double var = acc.sum_sq / static_cast<double>(acc.n) - m.mean_d_mm * m.mean_d_mm;
  m.sd_mm = std::sqrt(std::max(0.0, var));
  m.max_d_mm = acc.max;
  return m;
}

double tour_length_mm(const TouchPlan& plan) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < plan.contacts.size(); ++i) {
    const auto& a = plan.contacts[i].position;
    const auto& b = plan.contacts[i + 1].position;
    total += (a.vec() - b.vec()).norm();
  }
  return total;
}

double timing_model(const TouchPlan& plan, double per_touch_s, double travel_mm_per_s) {
  if (!(per_touch_s >= 0.0) || !(travel_mm_per_s > 0.0))
    throw std::invalid_argument("timing model needs non-negative touch time and positive speed");
  return static_cast<double>(plan.contacts.size()) * per_touch_s +
         tour_length_mm(plan) / travel_mm_per_s;
}

}  // namespace crackscan
