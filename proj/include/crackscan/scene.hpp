#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crackscan/raster.hpp"

namespace crackscan {

enum class CrackKind { real, painted };

std::string to_string(CrackKind k);
CrackKind crack_kind_from_string(const std::string& s);

/// One crack on the plate top surface. Real cracks are grooves with positive
/// depth; painted cracks are surface markings with zero depth that look the
/// same from above but have no relief.
struct CrackPath {
  std::vector<Point3> polyline;  // on the plate top surface, z = plate thickness
  double width_mm = 1.0;
  CrackKind kind = CrackKind::real;
  double depth_mm = 0.0;
};

/// Parametric ground truth: a planar plate with grooved and painted cracks.
/// The world frame is the plate frame; the plate occupies
/// [0, plate_width] x [0, plate_height] x [0, plate_thickness].
struct CrackScene {
  double plate_width_mm = 140.0;
  double plate_height_mm = 105.0;
  double plate_thickness_mm = 10.0;
  std::vector<CrackPath> cracks;
  double background_albedo = 0.85;
  double crack_albedo = 0.12;
  double paint_albedo = 0.12;
  std::uint64_t rng_seed = 0;

  double plate_top() const { return plate_thickness_mm; }

  /// Throws std::invalid_argument on violated invariants (polyline too short,
  /// out-of-bounds point, painted crack with depth, albedo out of range).
  void validate() const;
};

struct SceneGenParams {
  int n_real = 2;
  int n_fake = 2;
  double width_min_mm = 0.8;
  double width_max_mm = 2.5;
  double depth_min_mm = 1.0;
  double depth_max_mm = 3.0;
  double length_min_mm = 7.0;
  double length_max_mm = 10.0;
  double plate_width_mm = 140.0;
  double plate_height_mm = 105.0;
  double plate_thickness_mm = 10.0;
  double margin_mm = 12.0;      // keep-out band along the plate border
  double separation_mm = 12.0;  // minimum distance between crack centrelines
  double step_mm = 2.5;         // random-walk segment length
  double max_turn_rad = 0.35;   // per-step heading change bound
};

/// Deterministic for a fixed seed. Throws std::runtime_error when a crack
/// cannot be placed within 1000 attempts.
CrackScene generate_random_scene(std::uint64_t seed, const SceneGenParams& params);

/// Orthographic top view. A pixel takes the crack or paint albedo when its
/// centre lies within width/2 of the corresponding centreline, otherwise the
/// background albedo. Optional additive Gaussian noise is seeded from the
/// scene so renders are reproducible.
RasterImage render_top_view(const CrackScene& scene, double mm_per_px,
                            double noise_sigma = 0.0);

/// Depth image in mm: plate top everywhere except inside real cracks, where
/// the groove depth is subtracted. Painted cracks leave depth untouched.
RasterImage render_depth(const CrackScene& scene, double mm_per_px,
                         double noise_sigma = 0.0);

/// Binary mask of crack coverage by the same pixel-centre distance rule as
/// render_top_view.
RasterImage ground_truth_mask(const CrackScene& scene, double mm_per_px,
                              bool include_painted);

/// Groove opening outlines of the real cracks: one closed polyline per crack
/// (first point repeated last) on the plate top plane. Arc joins are sampled
/// at <= 5 degree steps.
std::vector<std::vector<Point3>> crack_boundary_polylines(const CrackScene& scene);

/// Centrelines of the real cracks, usable as an alternative reconstruction
/// truth.
std::vector<std::vector<Point3>> crack_centerline_polylines(const CrackScene& scene);

/// Planar distance from (x, y) to the crack's centreline.
double distance_to_crack(const CrackPath& crack, double x, double y);

void to_json(nlohmann::json& j, const CrackPath& c);
void from_json(const nlohmann::json& j, CrackPath& c);
void to_json(nlohmann::json& j, const CrackScene& s);
void from_json(const nlohmann::json& j, CrackScene& s);
void to_json(nlohmann::json& j, const SceneGenParams& p);
void from_json(const nlohmann::json& j, SceneGenParams& p);

void save_scene(const CrackScene& scene, const std::string& path);
CrackScene load_scene(const std::string& path);

}  // namespace crackscan
