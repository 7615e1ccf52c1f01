#include "crackscan/pipeline.hpp"

#include <filesystem>
#include <fstream>

namespace crackscan {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (!(mm_per_px > 0.0)) throw std::invalid_argument("mm_per_px must be positive");
  if (visual_noise_sigma < 0.0 || depth_noise_sigma < 0.0)
    throw std::invalid_argument("noise sigmas must be non-negative");
  if (!(per_touch_s >= 0.0)) throw std::invalid_argument("per_touch_s must be non-negative");
  if (!(travel_mm_per_s > 0.0)) throw std::invalid_argument("travel_mm_per_s must be positive");
  if (!(passive_overlap >= 0.0 && passive_overlap < 1.0))
    throw std::invalid_argument("passive_overlap must be in [0, 1)");
  segmenter.validate();
  planner.validate();
  sensor.validate();
  rejection.validate();
}

std::vector<std::vector<Point3>> scene_truth(const CrackScene& scene,
                                             const PipelineConfig& cfg) {
  return cfg.truth_centerline ? crack_centerline_polylines(scene)
                              : crack_boundary_polylines(scene);
}

PipelineResult run_guided_pipeline(const CrackScene& scene, const PipelineConfig& cfg) {
  cfg.validate();

  PipelineResult result;
  result.scene = scene;
  result.top_view = render_top_view(scene, cfg.mm_per_px, cfg.visual_noise_sigma);
  result.depth = render_depth(scene, cfg.mm_per_px, cfg.depth_noise_sigma);
  result.gt_real = ground_truth_mask(scene, cfg.mm_per_px, /*include_painted=*/false);
  result.gt_all = ground_truth_mask(scene, cfg.mm_per_px, /*include_painted=*/true);

  result.vision_mask = segment_baseline(result.top_view, cfg.segmenter);

  RasterImage skeleton = thin(result.vision_mask);
  if (cfg.prune_spurs_px > 0) skeleton = prune_spurs(skeleton, cfg.prune_spurs_px);
  result.graph = extract_graph(skeleton);

  result.plan = plan_scene(result.graph, result.depth, cfg.planner);
  result.frames = press_plan(scene, result.plan, cfg.sensor);
  result.rejected_edges = reject_false_edges(result.frames, cfg.rejection);
  result.refined_mask =
      refine_mask_by_rejection(result.vision_mask, result.graph, result.rejected_edges);

  result.vision_profile = reconstruct_vision(result.vision_mask, result.depth);
  result.aligned_profile = reconstruct_aligned_vision(result.vision_mask, scene.plate_top());
  result.active_profile =
      reconstruct_tactile(result.frames, cfg.sensor, default_sensor_to_ee(cfg.sensor),
                          result.rejected_edges, ReconMethod::active_tactile);

  result.truth = scene_truth(scene, cfg);
  result.detection_vision = detection_metrics(result.vision_mask, result.gt_real);
  result.detection_refined = detection_metrics(result.refined_mask, result.gt_real);

  const auto score = [&](const ReconstructedProfile& profile) -> std::optional<ReconMetrics> {
    if (profile.points.empty() || result.truth.empty()) return std::nullopt;
    return distance_metrics(profile.points, result.truth);
  };
  result.recon_vision = score(result.vision_profile);
  result.recon_aligned = score(result.aligned_profile);
  result.recon_active = score(result.active_profile);
  if (result.recon_active) {
    result.recon_active->time_s =
        timing_model(result.plan, cfg.per_touch_s, cfg.travel_mm_per_s);
    result.recon_active->n_touches = static_cast<int>(result.plan.size());
  }
  return result;
}

PassiveResult run_passive_baseline(const CrackScene& scene, const PipelineConfig& cfg) {
  cfg.validate();
  PassiveResult result;
  result.plan = passive_raster_plan(scene, cfg.sensor, cfg.passive_overlap);
  result.frames = press_plan(scene, result.plan, cfg.sensor);
  result.profile = reconstruct_tactile(result.frames, cfg.sensor,
                                       default_sensor_to_ee(cfg.sensor), {},
                                       ReconMethod::passive_tactile);
  const auto truth = scene_truth(scene, cfg);
  if (!result.profile.points.empty() && !truth.empty()) {
    result.metrics = distance_metrics(result.profile.points, truth);
    result.metrics->time_s = timing_model(result.plan, cfg.per_touch_s, cfg.travel_mm_per_s);
    result.metrics->n_touches = static_cast<int>(result.plan.size());
  }
  return result;
}

void write_run_artifacts(const PipelineResult& result, const PipelineConfig& cfg,
                         const std::string& out_dir) {
  const fs::path root(out_dir);
  for (const char* sub : {"scenes", "masks", "frames", "profiles", "reports"})
    fs::create_directories(root / sub);

  save_scene(result.scene, (root / "scenes/scene.json").string());
  save_raster(result.top_view, (root / "scenes/top_view.pgm").string());
  save_raster(result.depth, (root / "scenes/depth.pgm").string());
  save_raster(result.gt_real, (root / "scenes/gt_real.pgm").string());
  save_raster(result.gt_all, (root / "scenes/gt_all.pgm").string());

  save_mask(result.vision_mask, (root / "masks/vision_mask.pgm").string());
  save_mask(result.refined_mask, (root / "masks/refined_mask.pgm").string());
  save_graph(result.graph, (root / "masks/graph.json").string());

  save_plan(result.plan, (root / "frames/plan.json").string());
  for (std::size_t i = 0; i < result.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu.pgm", i);
    save_frame(result.frames[i], (root / "frames" / name).string());
  }
  nlohmann::json rejected = nlohmann::json::array();
  for (const int e : result.rejected_edges) rejected.push_back(e);
  std::ofstream rej(root / "frames/rejected_edges.json");
  rej << nlohmann::json{{"rejected_edges", rejected}}.dump(2) << "\n";

  save_profiles_csv({result.vision_profile, result.aligned_profile, result.active_profile},
                    (root / "profiles/profiles.csv").string());
  save_profiles_ply({result.vision_profile, result.aligned_profile, result.active_profile},
                    (root / "profiles/profiles.ply").string());

  save_config(cfg, (root / "reports/config.json").string());
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"seed", c.seed},
                     {"scene", c.scene},
                     {"mm_per_px", c.mm_per_px},
                     {"visual_noise_sigma", c.visual_noise_sigma},
                     {"depth_noise_sigma", c.depth_noise_sigma},
                     {"segmenter", c.segmenter},
                     {"planner", c.planner},
                     {"sensor", c.sensor},
                     {"rejection", c.rejection},
                     {"prune_spurs_px", c.prune_spurs_px},
                     {"per_touch_s", c.per_touch_s},
                     {"travel_mm_per_s", c.travel_mm_per_s},
                     {"truth", c.truth_centerline ? "centerline" : "boundary"},
                     {"passive_overlap", c.passive_overlap}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  PipelineConfig defaults;
  c.seed = j.value("seed", defaults.seed);
  if (j.contains("scene")) c.scene = j.at("scene").get<SceneGenParams>();
  c.mm_per_px = j.value("mm_per_px", defaults.mm_per_px);
  c.visual_noise_sigma = j.value("visual_noise_sigma", defaults.visual_noise_sigma);
  c.depth_noise_sigma = j.value("depth_noise_sigma", defaults.depth_noise_sigma);
  if (j.contains("segmenter")) c.segmenter = j.at("segmenter").get<SegmenterConfig>();
  if (j.contains("planner")) c.planner = j.at("planner").get<PlannerConfig>();
  if (j.contains("sensor")) c.sensor = j.at("sensor").get<SensorModel>();
  if (j.contains("rejection")) c.rejection = j.at("rejection").get<RejectionConfig>();
  c.prune_spurs_px = j.value("prune_spurs_px", defaults.prune_spurs_px);
  c.per_touch_s = j.value("per_touch_s", defaults.per_touch_s);
  c.travel_mm_per_s = j.value("travel_mm_per_s", defaults.travel_mm_per_s);
  const std::string truth = j.value("truth", "boundary");
  if (truth != "boundary" && truth != "centerline")
    throw std::invalid_argument("config field 'truth' must be 'boundary' or 'centerline'");
  c.truth_centerline = truth == "centerline";
  c.passive_overlap = j.value("passive_overlap", defaults.passive_overlap);
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid config file " + path + ": " + e.what());
  }
  PipelineConfig cfg;
  try {
    cfg = j.get<PipelineConfig>();
    cfg.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
  return cfg;
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open config file for writing: " + path);
  out << nlohmann::json(cfg).dump(2) << "\n";
}

}  // namespace crackscan
