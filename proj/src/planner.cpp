#include "crackscan/planner.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace crackscan {

namespace {

constexpr double kPi = 3.14159265358979323846;

double world_distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

double normalize_yaw(double yaw) {
  while (yaw > kPi) yaw -= 2.0 * kPi;
  while (yaw <= -kPi) yaw += 2.0 * kPi;
  return yaw;
}

}  // namespace

void PlannerConfig::validate() const {
  if (!(step_d_mm > 0.0)) throw std::invalid_argument("planner step bound must be positive");
}

Point3 pixel_to_world(const PixelPoint& px, const RasterImage& depth) {
  const int row = static_cast<int>(std::lround(px.v));
  const int col = static_cast<int>(std::lround(px.u));
  if (!depth.in_bounds(row, col))
    throw std::out_of_range("pixel (" + std::to_string(px.u) + ", " + std::to_string(px.v) +
                            ") outside the depth raster");
  return {depth.origin.x + px.u * depth.scale_mm_per_px,
          depth.origin.y + px.v * depth.scale_mm_per_px, depth.at(row, col), Frame::world};
}

std::vector<std::size_t> plan_edge_indices(const std::vector<Pixel>& edge,
                                           const RasterImage& depth,
                                           const PlannerConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> picks;
  if (edge.empty()) return picks;

  std::vector<Point3> world(edge.size());
  for (std::size_t i = 0; i < edge.size(); ++i) {
    world[i] = pixel_to_world({static_cast<double>(edge[i].col),
                               static_cast<double>(edge[i].row)}, depth);
  }

  std::size_t current = 0;
  picks.push_back(current);
  const std::size_t last = edge.size() - 1;
  while (current != last) {
    double best = -1.0;
    std::size_t best_idx = current;
    bool found = false;
    for (std::size_t k = current + 1; k < edge.size(); ++k) {
      const double d = world_distance(world[current], world[k]);
      if (d >= cfg.step_d_mm) continue;
      if (d >= best) {  // ties go to the later pixel
        best = d;
        best_idx = k;
        found = true;
      }
    }
    if (!found) {
      picks.push_back(last);  // sub-millimetre pixel steps make this unreachable
      break;
    }
    current = best_idx;
    picks.push_back(current);
  }
  return picks;
}

std::vector<Point3> plan_edge(const std::vector<Pixel>& edge, const RasterImage& depth,
                              const PlannerConfig& cfg) {
  std::vector<Point3> out;
  for (const std::size_t idx : plan_edge_indices(edge, depth, cfg)) {
    out.push_back(pixel_to_world({static_cast<double>(edge[idx].col),
                                  static_cast<double>(edge[idx].row)}, depth));
  }
  return out;
}

std::vector<ContactPose> assign_yaw(const std::vector<ContactPose>& contacts) {
  std::vector<ContactPose> out = contacts;
  if (out.size() <= 1) {
    for (auto& c : out) c.yaw_rad = 0.0;
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = i;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j == i) continue;
      const double d = world_distance(out[i].position, out[j].position);
      if (d < best) {
        best = d;
        nearest = j;
      }
    }
    out[i].yaw_rad = normalize_yaw(std::atan2(out[nearest].position.y - out[i].position.y,
                                              out[nearest].position.x - out[i].position.x));
  }
  return out;
}

TouchPlan plan_scene(const SkeletonGraph& graph, const RasterImage& depth,
                     const PlannerConfig& cfg) {
  TouchPlan plan;
  plan.step_d_mm = cfg.step_d_mm;
  std::vector<ContactPose> contacts;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    for (const std::size_t idx : plan_edge_indices(edge.pixels, depth, cfg)) {
      ContactPose pose;
      pose.source_edge = static_cast<int>(e);
      pose.source_pixel = {static_cast<double>(edge.pixels[idx].col),
                           static_cast<double>(edge.pixels[idx].row)};
      pose.position = pixel_to_world(pose.source_pixel, depth);
      contacts.push_back(pose);
    }
  }
  plan.contacts = assign_yaw(contacts);
  return plan;
}

void to_json(nlohmann::json& j, const PlannerConfig& c) {
  j = nlohmann::json{{"step_d_mm", c.step_d_mm}};
}

void from_json(const nlohmann::json& j, PlannerConfig& c) {
  PlannerConfig defaults;
  c.step_d_mm = j.value("step_d_mm", defaults.step_d_mm);
}

void to_json(nlohmann::json& j, const ContactPose& c) {
  j = nlohmann::json{{"position", c.position},
                     {"yaw_rad", c.yaw_rad},
                     {"source_edge", c.source_edge},
                     {"source_pixel_uv", c.source_pixel}};
}

void from_json(const nlohmann::json& j, ContactPose& c) {
  c.position = j.at("position").get<Point3>();
  c.yaw_rad = j.at("yaw_rad").get<double>();
  c.source_edge = j.at("source_edge").get<int>();
  c.source_pixel = j.at("source_pixel_uv").get<PixelPoint>();
}

void to_json(nlohmann::json& j, const TouchPlan& p) {
  j = nlohmann::json{{"step_d_mm", p.step_d_mm}, {"contacts", p.contacts}};
}

void from_json(const nlohmann::json& j, TouchPlan& p) {
  p.step_d_mm = j.at("step_d_mm").get<double>();
  p.contacts = j.at("contacts").get<std::vector<ContactPose>>();
}

void save_plan(const TouchPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open plan file for writing: " + path);
  out << nlohmann::json(plan).dump(2) << "\n";
}

TouchPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid plan file " + path + ": " + e.what());
  }
  return j.get<TouchPlan>();
}

}  // namespace crackscan
