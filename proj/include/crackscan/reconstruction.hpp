#pragma once

#include <set>
#include <string>
#include <vector>

#include "crackscan/tactile.hpp"

namespace crackscan {

enum class ReconMethod { vision, aligned_vision, passive_tactile, active_tactile };

std::string to_string(ReconMethod m);
ReconMethod recon_method_from_string(const std::string& s);

/// World-space crack points produced by one reconstruction method.
/// frame_ids holds the index of the originating tactile frame per point
/// (-1 for vision methods).
struct ReconstructedProfile {
  std::vector<Point3> points;
  ReconMethod method = ReconMethod::vision;
  std::vector<int> frame_ids;
};

/// Crack pixels with at least one non-crack 8-neighbour, or on the image
/// border. Row-major order.
std::vector<PixelPoint> extract_boundary_pixels(const RasterImage& mask);

/// Lifts the frame's detected boundary pixels to the world: backprojection
/// onto the elastomer plane, then the sensor-to-end-effector transform and
/// the contact's end-effector-to-world transform.
std::vector<Point3> reconstruct_frame(const TactileFrame& frame, const SensorModel& sensor,
                                      const RigidTransform& sensor_to_ee);

/// Active/passive tactile reconstruction over a frame sequence; frames whose
/// edge id is in rejected_edges are skipped.
ReconstructedProfile reconstruct_tactile(const std::vector<TactileFrame>& frames,
                                         const SensorModel& sensor,
                                         const RigidTransform& sensor_to_ee,
                                         const std::set<int>& rejected_edges,
                                         ReconMethod method);

/// Every crack-mask pixel lifted through the depth raster.
ReconstructedProfile reconstruct_vision(const RasterImage& mask, const RasterImage& depth);

/// As reconstruct_vision, but z is replaced by the known surface height.
ReconstructedProfile reconstruct_aligned_vision(const RasterImage& mask, double table_z);

/// Exhaustive raster of presses covering the plate with footprint stride
/// view size * (1 - overlap). The cost baseline for guided touching.
TouchPlan passive_raster_plan(const CrackScene& scene, const SensorModel& sensor,
                              double overlap);

// Profile persistence: CSV columns x_mm,y_mm,z_mm,method,frame_id (17
// significant digits, lossless for doubles) and PLY-compatible ASCII.
void save_profiles_csv(const std::vector<ReconstructedProfile>& profiles,
                       const std::string& path);
std::vector<ReconstructedProfile> load_profiles_csv(const std::string& path);
void save_profiles_ply(const std::vector<ReconstructedProfile>& profiles,
                       const std::string& path);

}  // namespace crackscan
