#pragma once

#include <optional>
#include <string>

#include "crackscan/metrics.hpp"
#include "crackscan/reconstruction.hpp"

namespace crackscan {

/// Everything one end-to-end run needs. A fixed seed makes the whole run,
/// including file outputs, deterministic.
struct PipelineConfig {
  std::uint64_t seed = 1;
  SceneGenParams scene;
  double mm_per_px = 0.5;        // overhead camera resolution
  double visual_noise_sigma = 0.02;
  double depth_noise_sigma = 0.3;
  SegmenterConfig segmenter;
  PlannerConfig planner;
  SensorModel sensor = SensorModel::standard();
  RejectionConfig rejection;
  int prune_spurs_px = 0;  // 0 disables spur pruning
  double per_touch_s = 1.0;
  double travel_mm_per_s = 50.0;
  bool truth_centerline = false;  // score against centrelines instead of groove outlines
  double passive_overlap = 0.0;

  void validate() const;
};

/// Guided-run artifacts and scores for one scene.
struct PipelineResult {
  CrackScene scene;
  RasterImage top_view;
  RasterImage depth;
  RasterImage gt_real;  // real cracks only
  RasterImage gt_all;   // real and painted
  RasterImage vision_mask;
  SkeletonGraph graph;
  TouchPlan plan;
  std::vector<TactileFrame> frames;
  std::set<int> rejected_edges;
  RasterImage refined_mask;
  ReconstructedProfile vision_profile;
  ReconstructedProfile aligned_profile;
  ReconstructedProfile active_profile;
  std::vector<std::vector<Point3>> truth;

  DetectionMetrics detection_vision;   // raw visual mask vs real ground truth
  DetectionMetrics detection_refined;  // after tactile false-positive rejection
  std::optional<ReconMetrics> recon_vision;
  std::optional<ReconMetrics> recon_aligned;
  std::optional<ReconMetrics> recon_active;
};

/// Passive raster baseline over the same scene.
struct PassiveResult {
  TouchPlan plan;
  std::vector<TactileFrame> frames;
  ReconstructedProfile profile;
  std::optional<ReconMetrics> metrics;
};

PipelineResult run_guided_pipeline(const CrackScene& scene, const PipelineConfig& cfg);
PassiveResult run_passive_baseline(const CrackScene& scene, const PipelineConfig& cfg);

/// Reconstruction truth for a scene under the configured convention.
std::vector<std::vector<Point3>> scene_truth(const CrackScene& scene,
                                             const PipelineConfig& cfg);

/// Writes the artifact tree: scenes/, masks/, frames/, profiles/, reports/.
void write_run_artifacts(const PipelineResult& result, const PipelineConfig& cfg,
                         const std::string& out_dir);

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);

/// Loads and validates a config document; errors name the offending field.
PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace crackscan
