#include "crackscan/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace crackscan {

namespace {

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool scene_has_fakes(const CrackScene& scene) {
  return std::any_of(scene.cracks.begin(), scene.cracks.end(),
                     [](const CrackPath& c) { return c.kind == CrackKind::painted; });
}

}  // namespace

std::vector<CrackScene> generate_scene_suite(std::uint64_t first_seed, int count,
                                             const SceneGenParams& params) {
  std::vector<CrackScene> scenes;
  scenes.reserve(count);
  for (int i = 0; i < count; ++i)
    scenes.push_back(generate_random_scene(first_seed + static_cast<std::uint64_t>(i), params));
  return scenes;
}

std::vector<ReportRow> run_benchmark(const std::vector<CrackScene>& scenes,
                                     const BenchmarkConfig& cfg) {
  std::vector<ReportRow> rows;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const auto& scene = scenes[s];
    const bool fakes = scene_has_fakes(scene);
    const int scene_id = static_cast<int>(s);

    const PipelineResult run = run_guided_pipeline(scene, cfg.pipeline);

    rows.push_back({scene_id, "vision", fakes, run.detection_vision, run.recon_vision});
    rows.push_back({scene_id, "aligned-vision", fakes, std::nullopt, run.recon_aligned});
    if (cfg.include_passive) {
      const PassiveResult passive = run_passive_baseline(scene, cfg.pipeline);
      rows.push_back({scene_id, "passive-tactile", fakes, std::nullopt, passive.metrics});
    }
    rows.push_back({scene_id, "active-tactile", fakes, run.detection_refined, run.recon_active});
  }
  return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "scene_id,method,fake_painting,pixacc,iou,mean_d_mm,sd_mm,max_d_mm,time_s,n_touches\n";
  for (const auto& row : rows) {
    out << row.scene_id << "," << row.method << "," << (row.fake_painting ? "yes" : "no") << ",";
    if (row.detection)
      out << csv_number(row.detection->pixacc) << "," << csv_number(row.detection->iou);
    else
      out << "na,na";
    out << ",";
    if (row.recon) {
      out << csv_number(row.recon->mean_d_mm) << "," << csv_number(row.recon->sd_mm) << ","
          << csv_number(row.recon->max_d_mm) << "," << csv_number(row.recon->time_s) << ","
          << row.recon->n_touches;
    } else {
      out << "na,na,na,na,na";
    }
    out << "\n";
  }
  return out.str();
}

void save_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report CSV for writing: " + path);
  out << report_to_csv(rows);
}

BenchmarkSummary summarize_report(const std::vector<ReportRow>& rows) {
  BenchmarkSummary sum;

  struct SceneCells {
    bool fakes = false;
    std::optional<double> vision_d, aligned_d, active_d;
    std::optional<double> vision_iou, refined_iou, vision_pixacc, refined_pixacc;
    std::optional<int> guided_touches, passive_touches;
  };
  std::map<int, SceneCells> by_scene;
  for (const auto& row : rows) {
    auto& cells = by_scene[row.scene_id];
    cells.fakes = cells.fakes || row.fake_painting;
    if (row.method == "vision") {
      if (row.recon) cells.vision_d = row.recon->mean_d_mm;
      if (row.detection) {
        cells.vision_iou = row.detection->iou;
        cells.vision_pixacc = row.detection->pixacc;
      }
    } else if (row.method == "aligned-vision") {
      if (row.recon) cells.aligned_d = row.recon->mean_d_mm;
    } else if (row.method == "active-tactile") {
      if (row.recon) {
        cells.active_d = row.recon->mean_d_mm;
        cells.guided_touches = row.recon->n_touches;
      }
      if (row.detection) {
        cells.refined_iou = row.detection->iou;
        cells.refined_pixacc = row.detection->pixacc;
      }
    } else if (row.method == "passive-tactile") {
      if (row.recon) cells.passive_touches = row.recon->n_touches;
    }
  }

  double vision_sum = 0.0, aligned_sum = 0.0, active_sum = 0.0;
  int recon_scenes = 0;
  sum.min_passive_touches = std::numeric_limits<int>::max();
  bool any_passive = false;
  bool efficiency_ok = true;
  for (const auto& [id, cells] : by_scene) {
    ++sum.scenes_total;
    if (cells.vision_d && cells.aligned_d && cells.active_d) {
      vision_sum += *cells.vision_d;
      aligned_sum += *cells.aligned_d;
      active_sum += *cells.active_d;
      ++recon_scenes;
    }
    if (cells.fakes) {
      ++sum.fake_scenes;
      if (cells.vision_iou && cells.refined_iou && *cells.refined_iou > *cells.vision_iou)
        ++sum.detection_improved;
    }
    if (cells.vision_pixacc && cells.refined_pixacc)
      sum.max_pixacc_drop =
          std::max(sum.max_pixacc_drop, *cells.vision_pixacc - *cells.refined_pixacc);
    if (cells.guided_touches && cells.passive_touches) {
      any_passive = true;
      sum.max_guided_touches = std::max(sum.max_guided_touches, *cells.guided_touches);
      sum.min_passive_touches = std::min(sum.min_passive_touches, *cells.passive_touches);
      if (*cells.guided_touches * 10 > *cells.passive_touches) efficiency_ok = false;
    }
  }
  if (recon_scenes > 0) {
    sum.mean_vision_d = vision_sum / recon_scenes;
    sum.mean_aligned_d = aligned_sum / recon_scenes;
    sum.mean_active_d = active_sum / recon_scenes;
    sum.recon_ordering_ok =
        sum.mean_active_d < sum.mean_aligned_d && sum.mean_aligned_d < sum.mean_vision_d;
  }
  sum.detection_ok = sum.fake_scenes > 0 &&
                     sum.detection_improved >= sum.fake_scenes - 1 &&
                     sum.max_pixacc_drop <= 0.01;
  if (!any_passive) sum.min_passive_touches = 0;
  sum.efficiency_ok = any_passive && efficiency_ok;
  return sum;
}

namespace {

// Greedy nearest-neighbour chaining, presentation only. Returns chains of
// indices; a chain breaks when the nearest remaining point is farther than
// the break distance.
std::vector<std::vector<std::size_t>> chain_points(const std::vector<Point3>& pts,
                                                   double break_mm) {
  std::vector<std::vector<std::size_t>> chains;
  std::vector<bool> used(pts.size(), false);
  for (std::size_t seed = 0; seed < pts.size(); ++seed) {
    if (used[seed]) continue;
    std::vector<std::size_t> chain{seed};
    used[seed] = true;
    std::size_t cur = seed;
    while (true) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t next = cur;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (used[j]) continue;
        const double d = std::hypot(pts[cur].x - pts[j].x, pts[cur].y - pts[j].y);
        if (d < best) {
          best = d;
          next = j;
        }
      }
      if (next == cur || best > break_mm) break;
      used[next] = true;
      chain.push_back(next);
      cur = next;
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

const char* method_color(ReconMethod m) {
  switch (m) {
    case ReconMethod::vision: return "#9e9e9e";
    case ReconMethod::aligned_vision: return "#d32f2f";
    case ReconMethod::passive_tactile: return "#f9c80e";
    case ReconMethod::active_tactile: return "#2e7d32";
  }
  return "#000000";
}

}  // namespace

void save_overlay_svg(const CrackScene& scene,
                      const std::vector<std::vector<Point3>>& truth,
                      const std::vector<ReconstructedProfile>& profiles,
                      const std::string& path) {
  const double px_per_mm = 6.0;
  const double margin = 12.0;
  const double w = scene.plate_width_mm * px_per_mm + 2 * margin;
  const double h = scene.plate_height_mm * px_per_mm + 2 * margin;
  const auto sx = [&](double x) { return margin + x * px_per_mm; };
  const auto sy = [&](double y) { return margin + y * px_per_mm; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open SVG for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "  <rect x=\"" << sx(0) << "\" y=\"" << sy(0) << "\" width=\""
      << scene.plate_width_mm * px_per_mm << "\" height=\"" << scene.plate_height_mm * px_per_mm
      << "\" fill=\"#f4f1ea\" stroke=\"#444\"/>\n";

  for (const auto& ring : truth) {
    out << "  <polyline fill=\"none\" stroke=\"#1565c0\" stroke-width=\"1.2\" points=\"";
    for (const auto& p : ring) out << sx(p.x) << "," << sy(p.y) << " ";
    out << "\"/>\n";
  }

  for (const auto& profile : profiles) {
    if (profile.points.empty()) continue;
    std::vector<Point3> pts = profile.points;
    if (pts.size() > 1500) {  // subsample for presentation
      std::vector<Point3> sampled;
      const double step = static_cast<double>(pts.size()) / 1500.0;
      for (double i = 0; i < static_cast<double>(pts.size()); i += step)
        sampled.push_back(pts[static_cast<std::size_t>(i)]);
      pts = std::move(sampled);
    }
    const char* color = method_color(profile.method);
    for (const auto& chain : chain_points(pts, 2.0)) {
      if (chain.size() == 1) {
        const auto& p = pts[chain[0]];
        out << "  <circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
            << "\" r=\"0.8\" fill=\"" << color << "\"/>\n";
        continue;
      }
      out << "  <polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"0.9\" points=\"";
      for (const std::size_t idx : chain) out << sx(pts[idx].x) << "," << sy(pts[idx].y) << " ";
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace crackscan
