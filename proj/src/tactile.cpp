#include "crackscan/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace crackscan {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void RejectionConfig::validate() const {
  if (!(area_threshold > 0.0 && area_threshold < 1.0))
    throw std::invalid_argument("rejection area threshold must be in (0, 1)");
  if (min_low_frames < 1)
    throw std::invalid_argument("rejection needs min_low_frames >= 1");
}

RigidTransform default_sensor_to_ee(const SensorModel& sensor) {
  RigidTransform t = RigidTransform::translate(0.0, 0.0, -sensor.standoff_mm);
  t.from = Frame::sensor;
  t.to = Frame::end_effector;
  return t;
}

RigidTransform contact_ee_to_world(const ContactPose& pose) {
  RigidTransform t;
  t.rotation = (Eigen::AngleAxisd(pose.yaw_rad, Eigen::Vector3d::UnitZ()) *
                Eigen::AngleAxisd(kPi, Eigen::Vector3d::UnitX()))
                   .toRotationMatrix();
  t.translation = pose.position.vec();
  t.from = Frame::end_effector;
  t.to = Frame::world;
  return t;
}

TactileFrame press(const CrackScene& scene, const ContactPose& pose,
                   const SensorModel& sensor) {
  sensor.validate();
  if (pose.position.x < 0.0 || pose.position.x > scene.plate_width_mm ||
      pose.position.y < 0.0 || pose.position.y > scene.plate_height_mm) {
    throw std::domain_error("press pose is off the plate surface");
  }

  TactileFrame frame;
  frame.pose = pose;
  frame.pose.position.z = scene.plate_top();  // descend until contact
  frame.edge_id = pose.source_edge;

  const RigidTransform sensor_to_world =
      compose(contact_ee_to_world(frame.pose), default_sensor_to_ee(sensor));
  const RigidTransform world_to_sensor = invert(sensor_to_world);

  RasterImage img =
      RasterImage::make(sensor.image_width, sensor.image_height, Channels::binary);
  img.scale_mm_per_px = sensor.pixel_pitch_x();
  img.origin = backproject_image_to_sensor({0.0, 0.0}, sensor);

  // View footprint in world x/y, for a cheap crack rejection test.
  double view_min_x = std::numeric_limits<double>::infinity();
  double view_min_y = view_min_x;
  double view_max_x = -view_min_x;
  double view_max_y = -view_min_x;
  const double corners[4][2] = {{0.0, 0.0},
                                {static_cast<double>(sensor.image_width - 1), 0.0},
                                {0.0, static_cast<double>(sensor.image_height - 1)},
                                {static_cast<double>(sensor.image_width - 1),
                                 static_cast<double>(sensor.image_height - 1)}};
  for (const auto& c : corners) {
    const Point3 w = transform_point(backproject_image_to_sensor({c[0], c[1]}, sensor),
                                     sensor_to_world);
    view_min_x = std::min(view_min_x, w.x);
    view_min_y = std::min(view_min_y, w.y);
    view_max_x = std::max(view_max_x, w.x);
    view_max_y = std::max(view_max_y, w.y);
  }

  const double min_pitch = std::min(sensor.pixel_pitch_x(), sensor.pixel_pitch_y());
  for (const auto& crack : scene.cracks) {
    if (crack.kind != CrackKind::real) continue;  // no relief, no tactile response
    const double r = crack.width_mm / 2.0;
    for (std::size_t i = 0; i + 1 < crack.polyline.size(); ++i) {
      const auto& a = crack.polyline[i];
      const auto& b = crack.polyline[i + 1];
      if (std::max(a.x, b.x) + r < view_min_x || std::min(a.x, b.x) - r > view_max_x ||
          std::max(a.y, b.y) + r < view_min_y || std::min(a.y, b.y) - r > view_max_y)
        continue;

      // Candidate window in pixel space around the segment, then the exact
      // per-pixel test in world space.
      const Point3 sa = transform_point({a.x, a.y, scene.plate_top(), Frame::world},
                                        world_to_sensor);
      const Point3 sb = transform_point({b.x, b.y, scene.plate_top(), Frame::world},
                                        world_to_sensor);
      const PixelPoint pa = project_sensor_to_image(sa, sensor);
      const PixelPoint pb = project_sensor_to_image(sb, sensor);
      const double pad = r / min_pitch + 2.0;
      const int col_lo = std::max(0, static_cast<int>(std::floor(std::min(pa.u, pb.u) - pad)));
      const int col_hi = std::min(sensor.image_width - 1,
                                  static_cast<int>(std::ceil(std::max(pa.u, pb.u) + pad)));
      const int row_lo = std::max(0, static_cast<int>(std::floor(std::min(pa.v, pb.v) - pad)));
      const int row_hi = std::min(sensor.image_height - 1,
                                  static_cast<int>(std::ceil(std::max(pa.v, pb.v) + pad)));
      for (int row = row_lo; row <= row_hi; ++row) {
        for (int col = col_lo; col <= col_hi; ++col) {
          if (img.on(row, col)) continue;
          const Point3 w = transform_point(
              backproject_image_to_sensor({static_cast<double>(col),
                                           static_cast<double>(row)}, sensor),
              sensor_to_world);
          if (point_segment_distance_2d(w.x, w.y, a.x, a.y, b.x, b.y) <= r)
            img.at(row, col) = 1.0;
        }
      }
    }
  }

  frame.crack_area_fraction =
      static_cast<double>(img.count_nonzero()) / static_cast<double>(img.size());
  frame.image = std::move(img);
  return frame;
}

std::vector<TactileFrame> press_plan(const CrackScene& scene, const TouchPlan& plan,
                                     const SensorModel& sensor) {
  std::vector<TactileFrame> frames;
  frames.reserve(plan.contacts.size());
  for (const auto& pose : plan.contacts) frames.push_back(press(scene, pose, sensor));
  return frames;
}

RasterImage detect_tactile_crack(const RasterImage& frame_image, const SegmenterConfig& cfg) {
  if (frame_image.channels == Channels::binary) return frame_image;
  return segment_baseline(frame_image, cfg);
}

std::set<int> reject_false_edges(const std::vector<TactileFrame>& frames,
                                 const RejectionConfig& cfg) {
  cfg.validate();
  std::map<int, int> low_counts;
  for (const auto& frame : frames) {
    if (frame.crack_area_fraction < cfg.area_threshold) ++low_counts[frame.edge_id];
  }
  std::set<int> rejected;
  for (const auto& [edge, count] : low_counts) {
    if (count >= cfg.min_low_frames) rejected.insert(edge);
  }
  return rejected;
}

RasterImage refine_mask_by_rejection(const RasterImage& mask, const SkeletonGraph& graph,
                                     const std::set<int>& rejected_edges) {
  if (rejected_edges.empty() || graph.edges.empty()) return mask;

  // Ownership of a skeleton pixel: the first edge listing it.
  std::vector<std::pair<Pixel, int>> owners;
  std::set<Pixel> seen;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    for (const auto& p : graph.edges[e].pixels) {
      if (seen.insert(p).second) owners.emplace_back(p, static_cast<int>(e));
    }
  }
  if (owners.empty()) return mask;

  RasterImage out = mask;
  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      if (!mask.on(row, col)) continue;
      long best = std::numeric_limits<long>::max();
      int owner = -1;
      for (const auto& [p, edge] : owners) {
        const long dr = p.row - row;
        const long dc = p.col - col;
        const long d2 = dr * dr + dc * dc;
        if (d2 < best) {
          best = d2;
          owner = edge;
        }
      }
      if (rejected_edges.count(owner)) out.at(row, col) = 0.0;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const RejectionConfig& c) {
  j = nlohmann::json{{"area_threshold", c.area_threshold},
                     {"min_low_frames", c.min_low_frames}};
}

void from_json(const nlohmann::json& j, RejectionConfig& c) {
  RejectionConfig defaults;
  c.area_threshold = j.value("area_threshold", defaults.area_threshold);
  c.min_low_frames = j.value("min_low_frames", defaults.min_low_frames);
}

void save_frame(const TactileFrame& frame, const std::string& pgm_path) {
  save_raster(frame.image, pgm_path);
  nlohmann::json meta{{"pose", frame.pose},
                      {"crack_area_fraction", frame.crack_area_fraction},
                      {"edge_id", frame.edge_id}};
  std::ofstream out(pgm_path + ".frame.json");
  if (!out) throw std::runtime_error("cannot open frame metadata for writing: " + pgm_path);
  out << meta.dump(2) << "\n";
}

TactileFrame load_frame(const std::string& pgm_path) {
  TactileFrame frame;
  frame.image = load_raster(pgm_path);
  std::ifstream in(pgm_path + ".frame.json");
  if (!in) throw std::runtime_error("missing frame metadata: " + pgm_path + ".frame.json");
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid frame metadata for " + pgm_path + ": " + e.what());
  }
  frame.pose = meta.at("pose").get<ContactPose>();
  frame.crack_area_fraction = meta.at("crack_area_fraction").get<double>();
  frame.edge_id = meta.at("edge_id").get<int>();
  return frame;
}

}  // namespace crackscan
