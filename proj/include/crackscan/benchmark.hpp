#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crackscan/pipeline.hpp"

namespace crackscan {

/// One scene/method line of the comparison table. Detection metrics are
/// filled where the method produces a refreshed overhead mask (the raw
/// visual mask for "vision", the rejection-refined mask for
/// "active-tactile"); reconstruction metrics are absent when the method
/// produced no points.
struct ReportRow {
  int scene_id = 0;
  std::string method;
  bool fake_painting = false;
  std::optional<DetectionMetrics> detection;
  std::optional<ReconMetrics> recon;
};

struct BenchmarkConfig {
  PipelineConfig pipeline;
  bool include_passive = true;
};

/// Runs all four methods over the scenes, in order. Deterministic for fixed
/// scenes and config.
std::vector<ReportRow> run_benchmark(const std::vector<CrackScene>& scenes,
                                     const BenchmarkConfig& cfg);

/// Seeded scene suite: seeds first_seed .. first_seed + count - 1.
std::vector<CrackScene> generate_scene_suite(std::uint64_t first_seed, int count,
                                             const SceneGenParams& params);

std::string report_to_csv(const std::vector<ReportRow>& rows);
void save_report_csv(const std::vector<ReportRow>& rows, const std::string& path);

/// Aggregates the benchmark table: per-method mean of mean distances,
/// detection improvement counts, and guided-vs-passive touch counts.
struct BenchmarkSummary {
  double mean_vision_d = 0.0;
  double mean_aligned_d = 0.0;
  double mean_active_d = 0.0;
  bool recon_ordering_ok = false;  // active < aligned < vision

  int scenes_total = 0;
  int fake_scenes = 0;           // scenes containing painted cracks
  int detection_improved = 0;    // fake scenes where refined IoU strictly exceeds the raw one
  double max_pixacc_drop = 0.0;  // worst per-scene pixacc decrease after refinement
  bool detection_ok = false;     // improvement on all fake scenes but at most one

  int max_guided_touches = 0;
  int min_passive_touches = 0;
  bool efficiency_ok = false;  // guided <= passive / 10 on every scene
};

BenchmarkSummary summarize_report(const std::vector<ReportRow>& rows);

/// Overlay figure: plate outline, truth outlines in blue, reconstructions as
/// nearest-neighbour-chained curves (aligned-vision red, passive-tactile
/// yellow, active-tactile green, vision gray).
void save_overlay_svg(const CrackScene& scene,
                      const std::vector<std::vector<Point3>>& truth,
                      const std::vector<ReconstructedProfile>& profiles,
                      const std::string& path);

}  // namespace crackscan
