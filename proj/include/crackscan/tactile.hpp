#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crackscan/planner.hpp"
#include "crackscan/scene.hpp"
#include "crackscan/segmentation.hpp"

namespace crackscan {

/// One simulated press: the effective contact pose, the binary sensor raster
/// and the fraction of raster pixels on crack.
struct TactileFrame {
  ContactPose pose;
  RasterImage image;
  double crack_area_fraction = 0.0;
  int edge_id = -1;
};

/// False-positive rule: an edge is rejected when at least min_low_frames of
/// its frames have a crack area fraction strictly below area_threshold.
struct RejectionConfig {
  double area_threshold = 1.0 / 50.0;
  int min_low_frames = 2;

  void validate() const;
};

/// Sensor-to-end-effector transform: the end-effector origin sits at the
/// centre of the elastomer surface, axes aligned with the sensor.
RigidTransform default_sensor_to_ee(const SensorModel& sensor);

/// End-effector-to-world transform for a contact: yaw about the surface
/// normal composed with a half-turn about x so the camera looks down at the
/// plate.
RigidTransform contact_ee_to_world(const ContactPose& pose);

/// Simulates a press at the pose. The elastomer lands on the plate top
/// surface (the planned z is advisory; a real arm descends until contact), and
/// a sensor pixel reads crack exactly when its backprojected world point lies
/// within width/2 of a real crack centreline. Painted cracks have no relief
/// and never respond. Throws std::domain_error when the pose is off the
/// plate.
TactileFrame press(const CrackScene& scene, const ContactPose& pose,
                   const SensorModel& sensor);

/// Presses every contact of the plan in order.
std::vector<TactileFrame> press_plan(const CrackScene& scene, const TouchPlan& plan,
                                     const SensorModel& sensor);

/// Identity on binary frames; grayscale frames (externally captured imagery)
/// are routed through the segmentation baseline.
RasterImage detect_tactile_crack(const RasterImage& frame_image,
                                 const SegmenterConfig& cfg = SegmenterConfig{});

/// Edge ids classified as false positives under the rejection rule.
std::set<int> reject_false_edges(const std::vector<TactileFrame>& frames,
                                 const RejectionConfig& cfg);

/// Removes mask pixels whose nearest skeleton pixel belongs to a rejected
/// edge.
RasterImage refine_mask_by_rejection(const RasterImage& mask, const SkeletonGraph& graph,
                                     const std::set<int>& rejected_edges);

void to_json(nlohmann::json& j, const RejectionConfig& c);
void from_json(const nlohmann::json& j, RejectionConfig& c);

/// Frame persistence: PGM raster plus "<path>.frame.json" with pose, edge id
/// and area fraction.
void save_frame(const TactileFrame& frame, const std::string& pgm_path);
TactileFrame load_frame(const std::string& pgm_path);

}  // namespace crackscan
