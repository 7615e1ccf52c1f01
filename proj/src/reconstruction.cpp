#include "crackscan/reconstruction.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crackscan/error.hpp"

namespace crackscan {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(ReconMethod m) {
  switch (m) {
    case ReconMethod::vision: return "vision";
    case ReconMethod::aligned_vision: return "aligned-vision";
    case ReconMethod::passive_tactile: return "passive-tactile";
    case ReconMethod::active_tactile: return "active-tactile";
  }
  return "vision";
}

ReconMethod recon_method_from_string(const std::string& s) {
  if (s == "vision") return ReconMethod::vision;
  if (s == "aligned-vision") return ReconMethod::aligned_vision;
  if (s == "passive-tactile") return ReconMethod::passive_tactile;
  if (s == "active-tactile") return ReconMethod::active_tactile;
  throw std::invalid_argument("unknown reconstruction method: " + s);
}

std::vector<PixelPoint> extract_boundary_pixels(const RasterImage& mask) {
  std::vector<PixelPoint> out;
  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      if (!mask.on(row, col)) continue;
      bool boundary = false;
      for (int dr = -1; dr <= 1 && !boundary; ++dr) {
        for (int dc = -1; dc <= 1 && !boundary; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int r = row + dr;
          const int c = col + dc;
          if (!mask.in_bounds(r, c) || !mask.on(r, c)) boundary = true;
        }
      }
      if (boundary) out.push_back({static_cast<double>(col), static_cast<double>(row)});
    }
  }
  return out;
}

std::vector<Point3> reconstruct_frame(const TactileFrame& frame, const SensorModel& sensor,
                                      const RigidTransform& sensor_to_ee) {
  const RigidTransform ee_to_world = contact_ee_to_world(frame.pose);
  std::vector<Point3> out;
  for (const auto& px : extract_boundary_pixels(frame.image)) {
    out.push_back(sensor_point_to_world(backproject_image_to_sensor(px, sensor),
                                        sensor_to_ee, ee_to_world));
  }
  return out;
}

ReconstructedProfile reconstruct_tactile(const std::vector<TactileFrame>& frames,
                                         const SensorModel& sensor,
                                         const RigidTransform& sensor_to_ee,
                                         const std::set<int>& rejected_edges,
                                         ReconMethod method) {
  ReconstructedProfile profile;
  profile.method = method;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (rejected_edges.count(frames[i].edge_id)) continue;
    for (const auto& p : reconstruct_frame(frames[i], sensor, sensor_to_ee)) {
      profile.points.push_back(p);
      profile.frame_ids.push_back(static_cast<int>(i));
    }
  }
  return profile;
}

ReconstructedProfile reconstruct_vision(const RasterImage& mask, const RasterImage& depth) {
  if (mask.width != depth.width || mask.height != depth.height)
    throw std::invalid_argument("vision reconstruction: mask and depth raster sizes differ");
  ReconstructedProfile profile;
  profile.method = ReconMethod::vision;
  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      if (!mask.on(row, col)) continue;
      profile.points.push_back(pixel_to_world(
          {static_cast<double>(col), static_cast<double>(row)}, depth));
      profile.frame_ids.push_back(-1);
    }
  }
  return profile;
}

ReconstructedProfile reconstruct_aligned_vision(const RasterImage& mask, double table_z) {
  ReconstructedProfile profile;
  profile.method = ReconMethod::aligned_vision;
  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      if (!mask.on(row, col)) continue;
      profile.points.push_back({mask.origin.x + col * mask.scale_mm_per_px,
                                mask.origin.y + row * mask.scale_mm_per_px, table_z,
                                Frame::world});
      profile.frame_ids.push_back(-1);
    }
  }
  return profile;
}

TouchPlan passive_raster_plan(const CrackScene& scene, const SensorModel& sensor,
                              double overlap) {
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw std::invalid_argument("raster overlap must be in [0, 1)");
  const double stride_x = sensor.view_width_mm * (1.0 - overlap);
  const double stride_y = sensor.view_height_mm * (1.0 - overlap);
  const int nx = std::max(1, static_cast<int>(std::ceil(scene.plate_width_mm / stride_x)));
  const int ny = std::max(1, static_cast<int>(std::ceil(scene.plate_height_mm / stride_y)));

  TouchPlan plan;
  plan.step_d_mm = std::max(stride_x, stride_y);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      ContactPose pose;
      pose.position = {std::min((ix + 0.5) * stride_x, scene.plate_width_mm),
                       std::min((iy + 0.5) * stride_y, scene.plate_height_mm),
                       scene.plate_top(), Frame::world};
      pose.yaw_rad = 0.0;
      pose.source_edge = -1;
      plan.contacts.push_back(pose);
    }
  }
  return plan;
}

void save_profiles_csv(const std::vector<ReconstructedProfile>& profiles,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open profile CSV for writing: " + path);
  out << "x_mm,y_mm,z_mm,method,frame_id\n";
  for (const auto& profile : profiles) {
    for (std::size_t i = 0; i < profile.points.size(); ++i) {
      const auto& p = profile.points[i];
      const int fid = i < profile.frame_ids.size() ? profile.frame_ids[i] : -1;
      out << format_double(p.x) << "," << format_double(p.y) << "," << format_double(p.z)
          << "," << to_string(profile.method) << "," << fid << "\n";
    }
  }
}

std::vector<ReconstructedProfile> load_profiles_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile CSV: " + path);
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line)) throw ParseError("empty profile CSV", 0);
  if (line != "x_mm,y_mm,z_mm,method,frame_id")
    throw ParseError("unexpected profile CSV header: " + line, 0);
  offset += line.size() + 1;

  std::vector<ReconstructedProfile> profiles;
  while (std::getline(in, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    std::stringstream ss(line);
    std::string xs, ys, zs, ms, fs;
    if (!std::getline(ss, xs, ',') || !std::getline(ss, ys, ',') ||
        !std::getline(ss, zs, ',') || !std::getline(ss, ms, ',') || !std::getline(ss, fs)) {
      throw ParseError("malformed profile CSV row: " + line, offset);
    }
    Point3 p;
    int fid = -1;
    try {
      p = {std::stod(xs), std::stod(ys), std::stod(zs), Frame::world};
      fid = std::stoi(fs);
    } catch (const std::exception&) {
      throw ParseError("non-numeric profile CSV field in row: " + line, offset);
    }
    const ReconMethod method = recon_method_from_string(ms);
    if (profiles.empty() || profiles.back().method != method) {
      ReconstructedProfile profile;
      profile.method = method;
      profiles.push_back(profile);
    }
    profiles.back().points.push_back(p);
    profiles.back().frame_ids.push_back(fid);
    offset += line.size() + 1;
  }
  return profiles;
}

void save_profiles_ply(const std::vector<ReconstructedProfile>& profiles,
                       const std::string& path) {
  std::size_t n = 0;
  for (const auto& profile : profiles) n += profile.points.size();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open PLY for writing: " + path);
  out << "ply\nformat ascii 1.0\nelement vertex " << n
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& profile : profiles) {
    for (const auto& p : profile.points) {
      out << format_double(p.x) << " " << format_double(p.y) << " " << format_double(p.z)
          << "\n";
    }
  }
}

}  // namespace crackscan
