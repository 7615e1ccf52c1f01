#pragma once

#include <string>
#include <vector>

#include "crackscan/skeleton.hpp"

namespace crackscan {

struct PlannerConfig {
  /// Maximum world distance between consecutive contacts on an edge. The
  /// default is four fifths of the sensor view length (0.8 * 14 mm).
  double step_d_mm = 0.8 * 14.0;

  void validate() const;
};

/// One planned press: world position, yaw about the surface normal, and the
/// edge/pixel it came from. Yaw is normalised to (-pi, pi].
struct ContactPose {
  Point3 position;  // world frame
  double yaw_rad = 0.0;
  int source_edge = -1;
  PixelPoint source_pixel;
};

/// Ordered contact poses, grouped by minimal edge (edge index ascending,
/// along-edge order within an edge).
struct TouchPlan {
  std::vector<ContactPose> contacts;
  double step_d_mm = 0.8 * 14.0;

  std::size_t size() const { return contacts.size(); }
  bool empty() const { return contacts.empty(); }
};

/// World position of a raster pixel: x/y from the raster placement, z sampled
/// from the depth raster. Throws std::out_of_range for pixels outside the
/// raster.
Point3 pixel_to_world(const PixelPoint& px, const RasterImage& depth);

/// Greedy contact selection along one ordered edge: starting from the first
/// pixel, repeatedly pick the admissible pixel (world distance to the current
/// contact strictly below the step bound) that lies farthest from it, until
/// the last pixel is reached. Ties pick the later pixel. Returns indices into
/// the edge. The last pixel is always selected.
std::vector<std::size_t> plan_edge_indices(const std::vector<Pixel>& edge,
                                           const RasterImage& depth,
                                           const PlannerConfig& cfg);

/// plan_edge_indices mapped through pixel_to_world.
std::vector<Point3> plan_edge(const std::vector<Pixel>& edge, const RasterImage& depth,
                              const PlannerConfig& cfg);

/// Assigns each contact the yaw of the planar vector towards its nearest
/// other contact, searched across all edges. A single contact gets yaw 0.
std::vector<ContactPose> assign_yaw(const std::vector<ContactPose>& contacts);

/// Plans every edge of the graph in index order and assigns yaws.
TouchPlan plan_scene(const SkeletonGraph& graph, const RasterImage& depth,
                     const PlannerConfig& cfg);

void to_json(nlohmann::json& j, const PlannerConfig& c);
void from_json(const nlohmann::json& j, PlannerConfig& c);
void to_json(nlohmann::json& j, const ContactPose& c);
void from_json(const nlohmann::json& j, ContactPose& c);
void to_json(nlohmann::json& j, const TouchPlan& p);
void from_json(const nlohmann::json& j, TouchPlan& p);

void save_plan(const TouchPlan& plan, const std::string& path);
TouchPlan load_plan(const std::string& path);

}  // namespace crackscan
