// crackscan: vision-guided tactile crack inspection pipeline driver.
//
// Subcommands mirror the pipeline stages (gen-scene, segment, skeleton, plan,
// touch, reconstruct, eval), plus `run` for the full guided pipeline with an
// artifact tree and `compare` for the four-method benchmark. Fixed seeds make
// every output byte-reproducible.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "crackscan/benchmark.hpp"

namespace fs = std::filesystem;
using namespace crackscan;

namespace {

struct ConfigCli {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> mm_per_px;
  std::optional<int> n_real, n_fake;
  std::optional<double> visual_noise, depth_noise;
  std::optional<double> seg_threshold;
  std::optional<int> seg_open, seg_close;
  std::optional<double> step_d_mm;
  std::optional<double> area_threshold;
  std::optional<int> min_low_frames;
  std::optional<int> prune_spurs_px;
  std::optional<double> passive_overlap;
  std::optional<std::string> truth;
};

void add_config_flags(CLI::App* cmd, ConfigCli* cli) {
  cmd->add_option("--config", cli->config_path, "Pipeline config JSON; flags override it");
  cmd->add_option("--seed", cli->seed, "Scene/run seed");
  cmd->add_option("--mm-per-px", cli->mm_per_px, "Overhead camera resolution (mm per pixel)");
  cmd->add_option("--n-real", cli->n_real, "Grooved cracks per generated scene");
  cmd->add_option("--n-fake", cli->n_fake, "Painted cracks per generated scene");
  cmd->add_option("--visual-noise", cli->visual_noise, "Top-view additive noise sigma");
  cmd->add_option("--depth-noise", cli->depth_noise, "Depth image noise sigma (mm)");
  cmd->add_option("--seg-threshold", cli->seg_threshold, "Segmentation intensity threshold");
  cmd->add_option("--seg-open", cli->seg_open, "Segmentation opening radius (px)");
  cmd->add_option("--seg-close", cli->seg_close, "Segmentation closing radius (px)");
  cmd->add_option("--step-d-mm", cli->step_d_mm,
                  "Contact step bound (default 4/5 of the sensor view length)");
  cmd->add_option("--area-threshold", cli->area_threshold,
                  "Low-contact area fraction for false-positive rejection");
  cmd->add_option("--min-low-frames", cli->min_low_frames,
                  "Low frames needed to reject an edge");
  cmd->add_option("--prune-spurs-px", cli->prune_spurs_px,
                  "Drop skeleton spurs shorter than this (0 = off)");
  cmd->add_option("--passive-overlap", cli->passive_overlap,
                  "Footprint overlap ratio of the passive raster");
  cmd->add_option("--truth", cli->truth, "Reconstruction truth: boundary or centerline")
      ->check(CLI::IsMember({"boundary", "centerline"}));
}

PipelineConfig resolve_config(const ConfigCli& cli) {
  PipelineConfig cfg;
  if (!cli.config_path.empty()) cfg = load_config(cli.config_path);
  if (cli.seed) cfg.seed = *cli.seed;
  if (cli.mm_per_px) cfg.mm_per_px = *cli.mm_per_px;
  if (cli.n_real) cfg.scene.n_real = *cli.n_real;
  if (cli.n_fake) cfg.scene.n_fake = *cli.n_fake;
  if (cli.visual_noise) cfg.visual_noise_sigma = *cli.visual_noise;
  if (cli.depth_noise) cfg.depth_noise_sigma = *cli.depth_noise;
  if (cli.seg_threshold) cfg.segmenter.threshold = *cli.seg_threshold;
  if (cli.seg_open) cfg.segmenter.open_radius = *cli.seg_open;
  if (cli.seg_close) cfg.segmenter.close_radius = *cli.seg_close;
  if (cli.step_d_mm) cfg.planner.step_d_mm = *cli.step_d_mm;
  if (cli.area_threshold) cfg.rejection.area_threshold = *cli.area_threshold;
  if (cli.min_low_frames) cfg.rejection.min_low_frames = *cli.min_low_frames;
  if (cli.prune_spurs_px) cfg.prune_spurs_px = *cli.prune_spurs_px;
  if (cli.passive_overlap) cfg.passive_overlap = *cli.passive_overlap;
  if (cli.truth) cfg.truth_centerline = *cli.truth == "centerline";
  cfg.validate();
  return cfg;
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%03zu.pgm", i);
  return buf;
}

int cmd_gen_scene(const ConfigCli& cli, const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(cli);
  const CrackScene scene = generate_random_scene(cfg.seed, cfg.scene);
  fs::create_directories(fs::path(out_dir) / "scenes");
  const fs::path dir = fs::path(out_dir) / "scenes";
  save_scene(scene, (dir / "scene.json").string());
  save_raster(render_top_view(scene, cfg.mm_per_px, cfg.visual_noise_sigma),
              (dir / "top_view.pgm").string());
  save_raster(render_depth(scene, cfg.mm_per_px, cfg.depth_noise_sigma),
              (dir / "depth.pgm").string());
  save_raster(ground_truth_mask(scene, cfg.mm_per_px, false), (dir / "gt_real.pgm").string());
  save_raster(ground_truth_mask(scene, cfg.mm_per_px, true), (dir / "gt_all.pgm").string());
  std::cout << "scene with " << scene.cracks.size() << " cracks written to " << dir.string()
            << "\n";
  return 0;
}

int cmd_segment(const std::string& image_path, const std::string& out_path,
                const ConfigCli& cli) {
  const PipelineConfig cfg = resolve_config(cli);
  const RasterImage image = load_raster(image_path);
  const RasterImage mask = segment_baseline(image, cfg.segmenter);
  save_mask(mask, out_path);
  std::cout << "mask with " << mask.count_nonzero() << " crack pixels written to " << out_path
            << "\n";
  return 0;
}

int cmd_skeleton(const std::string& mask_path, const std::string& out_path,
                 const ConfigCli& cli) {
  const PipelineConfig cfg = resolve_config(cli);
  RasterImage skeleton = thin(load_mask(mask_path));
  if (cfg.prune_spurs_px > 0) skeleton = prune_spurs(skeleton, cfg.prune_spurs_px);
  const SkeletonGraph graph = extract_graph(skeleton);
  save_graph(graph, out_path);
  std::cout << "graph: " << graph.end_points.size() << " end points, "
            << graph.branch_points.size() << " branch points, " << graph.edges.size()
            << " edges written to " << out_path << "\n";
  return 0;
}

int cmd_plan(const std::string& graph_path, const std::string& depth_path,
             const std::string& out_path, const ConfigCli& cli) {
  const PipelineConfig cfg = resolve_config(cli);
  const SkeletonGraph graph = load_graph(graph_path);
  const RasterImage depth = load_raster(depth_path);
  const TouchPlan plan = plan_scene(graph, depth, cfg.planner);
  save_plan(plan, out_path);
  std::cout << "plan with " << plan.size() << " contacts written to " << out_path << "\n";
  return 0;
}

int cmd_touch(const std::string& scene_path, const std::string& plan_path,
              const std::string& out_dir, const ConfigCli& cli) {
  const PipelineConfig cfg = resolve_config(cli);
  const CrackScene scene = load_scene(scene_path);
  const TouchPlan plan = load_plan(plan_path);
  const auto frames = press_plan(scene, plan, cfg.sensor);
  const auto rejected = reject_false_edges(frames, cfg.rejection);

  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < frames.size(); ++i)
    save_frame(frames[i], (fs::path(out_dir) / frame_name(i)).string());
  nlohmann::json rej = nlohmann::json::array();
  for (const int e : rejected) rej.push_back(e);
  std::ofstream rout(fs::path(out_dir) / "rejected_edges.json");
  rout << nlohmann::json{{"rejected_edges", rej}}.dump(2) << "\n";
  std::cout << frames.size() << " frames written to " << out_dir << "; " << rejected.size()
            << " edges rejected as false positives\n";
  return 0;
}

int cmd_reconstruct(const std::string& method_name, const std::string& mask_path,
                    const std::string& depth_path, double surface_z,
                    const std::string& frames_dir, const std::string& rejected_path,
                    const std::string& out_path, const ConfigCli& cli) {
  const PipelineConfig cfg = resolve_config(cli);
  const ReconMethod method = recon_method_from_string(method_name);
  ReconstructedProfile profile;
  if (method == ReconMethod::vision) {
    profile = reconstruct_vision(load_mask(mask_path), load_raster(depth_path));
  } else if (method == ReconMethod::aligned_vision) {
    profile = reconstruct_aligned_vision(load_mask(mask_path), surface_z);
  } else {
    std::vector<TactileFrame> frames;
    for (std::size_t i = 0;; ++i) {
      const fs::path p = fs::path(frames_dir) / frame_name(i);
      if (!fs::exists(p)) break;
      frames.push_back(load_frame(p.string()));
    }
    std::set<int> rejected;
    if (!rejected_path.empty()) {
      std::ifstream in(rejected_path);
      if (!in) throw std::runtime_error("cannot open rejected-edges file: " + rejected_path);
      nlohmann::json j;
      in >> j;
      for (const auto& e : j.at("rejected_edges")) rejected.insert(e.get<int>());
    }
    profile = reconstruct_tactile(frames, cfg.sensor, default_sensor_to_ee(cfg.sensor),
                                  rejected, method);
  }
  save_profiles_csv({profile}, out_path);
  std::cout << to_string(method) << " profile with " << profile.points.size()
            << " points written to " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& profiles_path, const std::string& scene_path,
             const std::string& out_path, const ConfigCli& cli) {
  const PipelineConfig cfg = resolve_config(cli);
  const CrackScene scene = load_scene(scene_path);
  const auto truth = scene_truth(scene, cfg);
  const auto profiles = load_profiles_csv(profiles_path);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open metrics CSV for writing: " + out_path);
  out << "method,n_points,mean_d_mm,sd_mm,max_d_mm\n";
  char buf[128];
  for (const auto& profile : profiles) {
    if (profile.points.empty() || truth.empty()) {
      out << to_string(profile.method) << "," << profile.points.size() << ",na,na,na\n";
      continue;
    }
    const ReconMetrics m = distance_metrics(profile.points, truth);
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g,%.17g\n",
                  to_string(profile.method).c_str(), profile.points.size(), m.mean_d_mm,
                  m.sd_mm, m.max_d_mm);
    out << buf;
  }
  std::cout << "metrics for " << profiles.size() << " profiles written to " << out_path << "\n";
  return 0;
}

int cmd_run(const ConfigCli& cli, const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(cli);
  const CrackScene scene = generate_random_scene(cfg.seed, cfg.scene);
  const PipelineResult result = run_guided_pipeline(scene, cfg);
  write_run_artifacts(result, cfg, out_dir);

  std::vector<ReportRow> rows;
  const bool fakes = cfg.scene.n_fake > 0;
  rows.push_back({0, "vision", fakes, result.detection_vision, result.recon_vision});
  rows.push_back({0, "aligned-vision", fakes, std::nullopt, result.recon_aligned});
  rows.push_back({0, "active-tactile", fakes, result.detection_refined, result.recon_active});
  save_report_csv(rows, (fs::path(out_dir) / "reports/report.csv").string());
  save_overlay_svg(scene, result.truth,
                   {result.vision_profile, result.aligned_profile, result.active_profile},
                   (fs::path(out_dir) / "reports/overlay.svg").string());

  std::cout << "run complete: " << result.plan.size() << " touches, "
            << result.rejected_edges.size() << " edges rejected; artifacts in " << out_dir
            << "\n";
  return 0;
}

int cmd_compare(const ConfigCli& cli, const std::string& out_dir, int n_scenes,
                std::uint64_t first_seed) {
  const PipelineConfig cfg = resolve_config(cli);
  BenchmarkConfig bench;
  bench.pipeline = cfg;
  const auto scenes = generate_scene_suite(first_seed, n_scenes, cfg.scene);
  const auto rows = run_benchmark(scenes, bench);

  fs::create_directories(fs::path(out_dir) / "reports");
  save_report_csv(rows, (fs::path(out_dir) / "reports/report.csv").string());
  {
    const PipelineResult first = run_guided_pipeline(scenes.front(), cfg);
    const PassiveResult passive = run_passive_baseline(scenes.front(), cfg);
    save_overlay_svg(scenes.front(), first.truth,
                     {first.vision_profile, first.aligned_profile, passive.profile,
                      first.active_profile},
                     (fs::path(out_dir) / "reports/overlay.svg").string());
  }

  const BenchmarkSummary sum = summarize_report(rows);
  std::cout << "scenes: " << sum.scenes_total << " (" << sum.fake_scenes << " with fakes)\n";
  std::printf("mean distance error (mm): vision %.4f | aligned-vision %.4f | active-tactile %.4f\n",
              sum.mean_vision_d, sum.mean_aligned_d, sum.mean_active_d);
  std::cout << "reconstruction ordering (active < aligned < vision): "
            << (sum.recon_ordering_ok ? "pass" : "fail") << "\n";
  if (sum.fake_scenes > 0) {
    std::cout << "detection refinement (IoU up on " << sum.detection_improved << "/"
              << sum.fake_scenes << " fake scenes, max pixacc drop "
              << sum.max_pixacc_drop << "): " << (sum.detection_ok ? "pass" : "fail") << "\n";
  }
  std::cout << "efficiency (guided <= passive/10, max guided " << sum.max_guided_touches
            << " vs passive " << sum.min_passive_touches
            << "): " << (sum.efficiency_ok ? "pass" : "fail") << "\n";
  std::cout << "report written to " << (fs::path(out_dir) / "reports/report.csv").string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vision-guided tactile crack detection and reconstruction toolkit"};
  app.require_subcommand(1);

  ConfigCli cli;
  std::string out_dir = "out";
  std::string image_path, mask_path, depth_path, graph_path, plan_path, scene_path;
  std::string frames_dir, rejected_path, profiles_path, out_path, method_name;
  double surface_z = 0.0;
  int n_scenes = 20;
  std::uint64_t first_seed = 1;

  auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic cracked plate");
  add_config_flags(gen, &cli);
  gen->add_option("--out-dir", out_dir, "Artifact directory");

  auto* seg = app.add_subcommand("segment", "Segment a top-view image into a crack mask");
  add_config_flags(seg, &cli);
  seg->add_option("--image", image_path, "Input grayscale PGM")->required();
  seg->add_option("--out", out_path, "Output mask PGM")->required();

  auto* ske = app.add_subcommand("skeleton", "Thin a mask and extract its topology graph");
  add_config_flags(ske, &cli);
  ske->add_option("--mask", mask_path, "Input mask PGM")->required();
  ske->add_option("--out", out_path, "Output graph JSON")->required();

  auto* pln = app.add_subcommand("plan", "Generate contact poses from a topology graph");
  add_config_flags(pln, &cli);
  pln->add_option("--graph", graph_path, "Topology graph JSON")->required();
  pln->add_option("--depth", depth_path, "Depth raster PGM")->required();
  pln->add_option("--out", out_path, "Output plan JSON")->required();

  auto* tch = app.add_subcommand("touch", "Simulate tactile presses along a plan");
  add_config_flags(tch, &cli);
  tch->add_option("--scene", scene_path, "Scene JSON")->required();
  tch->add_option("--plan", plan_path, "Plan JSON")->required();
  tch->add_option("--out-dir", out_dir, "Frame output directory");

  auto* rec = app.add_subcommand("reconstruct", "Lift detections to world-space crack points");
  add_config_flags(rec, &cli);
  rec->add_option("--method", method_name, "vision | aligned-vision | passive-tactile | active-tactile")
      ->required();
  rec->add_option("--mask", mask_path, "Crack mask PGM (vision methods)");
  rec->add_option("--depth", depth_path, "Depth raster PGM (vision)");
  rec->add_option("--surface-z", surface_z, "Known surface height (aligned-vision)");
  rec->add_option("--frames-dir", frames_dir, "Tactile frame directory (tactile methods)");
  rec->add_option("--rejected", rejected_path, "rejected_edges.json to exclude");
  rec->add_option("--out", out_path, "Output profile CSV")->required();

  auto* evl = app.add_subcommand("eval", "Score a profile CSV against scene ground truth");
  add_config_flags(evl, &cli);
  evl->add_option("--profiles", profiles_path, "Profile CSV")->required();
  evl->add_option("--scene", scene_path, "Scene JSON")->required();
  evl->add_option("--out", out_path, "Output metrics CSV")->required();

  auto* run = app.add_subcommand("run", "Full guided pipeline with artifact tree");
  add_config_flags(run, &cli);
  run->add_option("--out-dir", out_dir, "Artifact directory");

  auto* cmp = app.add_subcommand("compare", "Four-method benchmark over seeded scenes");
  add_config_flags(cmp, &cli);
  cmp->add_option("--out-dir", out_dir, "Artifact directory");
  cmp->add_option("--scenes", n_scenes, "Number of seeded scenes");
  cmp->add_option("--first-seed", first_seed, "Seed of the first scene");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_scene(cli, out_dir);
    if (seg->parsed()) return cmd_segment(image_path, out_path, cli);
    if (ske->parsed()) return cmd_skeleton(mask_path, out_path, cli);
    if (pln->parsed()) return cmd_plan(graph_path, depth_path, out_path, cli);
    if (tch->parsed()) return cmd_touch(scene_path, plan_path, out_dir, cli);
    if (rec->parsed())
      return cmd_reconstruct(method_name, mask_path, depth_path, surface_z, frames_dir,
                             rejected_path, out_path, cli);
    if (evl->parsed()) return cmd_eval(profiles_path, scene_path, out_path, cli);
    if (run->parsed()) return cmd_run(cli, out_dir);
    if (cmp->parsed()) return cmd_compare(cli, out_dir, n_scenes, first_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
