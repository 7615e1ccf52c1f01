#include "crackscan/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace crackscan {

std::string to_string(Frame f) {
  switch (f) {
    case Frame::sensor: return "sensor";
    case Frame::end_effector: return "end_effector";
    case Frame::world: return "world";
  }
  return "world";
}

Frame frame_from_string(const std::string& s) {
  if (s == "sensor") return Frame::sensor;
  if (s == "end_effector") return Frame::end_effector;
  if (s == "world") return Frame::world;
  throw std::invalid_argument("unknown frame name: " + s);
}

bool RigidTransform::valid(double tol) const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rotation.determinant() - 1.0) > tol) return false;
  return translation.allFinite();
}

RigidTransform RigidTransform::rotate_z(double angle_rad, Frame from, Frame to) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle_rad, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  t.from = from;
  t.to = to;
  return t;
}

SensorModel SensorModel::standard() {
  SensorModel s;
  s.intrinsics.fx = s.image_width * s.standoff_mm / s.view_width_mm;
  s.intrinsics.fy = s.image_height * s.standoff_mm / s.view_height_mm;
  s.intrinsics.u0 = s.image_width / 2.0;
  s.intrinsics.v0 = s.image_height / 2.0;
  return s;
}

void SensorModel::validate() const {
  if (intrinsics.fx <= 0.0 || intrinsics.fy <= 0.0)
    throw std::invalid_argument("sensor intrinsics: fx and fy must be positive");
  if (image_width <= 0 || image_height <= 0)
    throw std::invalid_argument("sensor raster dimensions must be positive");
  if (standoff_mm <= 0.0)
    throw std::invalid_argument("sensor standoff must be positive");
  const double implied_width = image_width * standoff_mm / intrinsics.fx;
  const double implied_height = image_height * standoff_mm / intrinsics.fy;
  if (std::abs(implied_width - view_width_mm) > 1e-6 ||
      std::abs(implied_height - view_height_mm) > 1e-6) {
    throw std::invalid_argument("sensor intrinsics inconsistent with view size");
  }
}

PixelPoint project_sensor_to_image(const Point3& p, const SensorModel& s) {
  if (!(p.z > 0.0))
    throw std::domain_error("point is not projectable: z must be positive");
  return {s.intrinsics.fx * p.x / p.z + s.intrinsics.u0,
          s.intrinsics.fy * p.y / p.z + s.intrinsics.v0};
}

Point3 backproject_image_to_sensor(const PixelPoint& px, const SensorModel& s) {
  const double z = s.standoff_mm;
  return {(px.u - s.intrinsics.u0) * z / s.intrinsics.fx,
          (px.v - s.intrinsics.v0) * z / s.intrinsics.fy, z, Frame::sensor};
}

Point3 transform_point(const Point3& p, const RigidTransform& t) {
  return Point3::from_vec(t.rotation * p.vec() + t.translation, t.to);
}

Point3 sensor_point_to_world(const Point3& p, const RigidTransform& sensor_to_ee,
                             const RigidTransform& ee_to_world) {
  return transform_point(transform_point(p, sensor_to_ee), ee_to_world);
}

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner) {
  RigidTransform t;
  t.rotation = outer.rotation * inner.rotation;
  t.translation = outer.rotation * inner.translation + outer.translation;
  t.from = inner.from;
  t.to = outer.to;
  return t;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform inv;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.rotation * t.translation);
  inv.from = t.to;
  inv.to = t.from;
  return inv;
}

double point_segment_distance_2d(double px, double py, double ax, double ay,
                                 double bx, double by) {
  const double abx = bx - ax;
  const double aby = by - ay;
  const double len2 = abx * abx + aby * aby;
  double s = 0.0;
  if (len2 > 0.0) {
    s = ((px - ax) * abx + (py - ay) * aby) / len2;
    s = std::clamp(s, 0.0, 1.0);
  }
  const double dx = px - (ax + s * abx);
  const double dy = py - (ay + s * aby);
  return std::sqrt(dx * dx + dy * dy);
}

double point_segment_distance_3d(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                 const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = 0.0;
  if (len2 > 0.0) s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

void to_json(nlohmann::json& j, const PixelPoint& p) { j = {p.u, p.v}; }
void from_json(const nlohmann::json& j, PixelPoint& p) {
  p.u = j.at(0).get<double>();
  p.v = j.at(1).get<double>();
}

void to_json(nlohmann::json& j, const Point3& p) {
  j = nlohmann::json{{"xyz_mm", {p.x, p.y, p.z}}, {"frame", to_string(p.frame)}};
}
void from_json(const nlohmann::json& j, Point3& p) {
  const auto& v = j.at("xyz_mm");
  p.x = v.at(0).get<double>();
  p.y = v.at(1).get<double>();
  p.z = v.at(2).get<double>();
  p.frame = frame_from_string(j.value("frame", "world"));
}

void to_json(nlohmann::json& j, const RigidTransform& t) {
  nlohmann::json rot = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation(r, c));
  j = nlohmann::json{{"rotation_row_major", rot},
                     {"translation_mm", {t.translation.x(), t.translation.y(), t.translation.z()}},
                     {"from", to_string(t.from)},
                     {"to", to_string(t.to)}};
}
void from_json(const nlohmann::json& j, RigidTransform& t) {
  const auto& rot = j.at("rotation_row_major");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot.at(r * 3 + c).get<double>();
  const auto& tr = j.at("translation_mm");
  t.translation = {tr.at(0).get<double>(), tr.at(1).get<double>(), tr.at(2).get<double>()};
  t.from = frame_from_string(j.value("from", "world"));
  t.to = frame_from_string(j.value("to", "world"));
}

void to_json(nlohmann::json& j, const CameraIntrinsics& k) {
  j = nlohmann::json{{"fx", k.fx}, {"fy", k.fy}, {"u0", k.u0}, {"v0", k.v0}};
}
void from_json(const nlohmann::json& j, CameraIntrinsics& k) {
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.u0 = j.at("u0").get<double>();
  k.v0 = j.at("v0").get<double>();
}

void to_json(nlohmann::json& j, const SensorModel& s) {
  j = nlohmann::json{{"view_width_mm", s.view_width_mm},
                     {"view_height_mm", s.view_height_mm},
                     {"image_width", s.image_width},
                     {"image_height", s.image_height},
                     {"standoff_mm", s.standoff_mm},
                     {"intrinsics", s.intrinsics}};
}
void from_json(const nlohmann::json& j, SensorModel& s) {
  s.view_width_mm = j.at("view_width_mm").get<double>();
  s.view_height_mm = j.at("view_height_mm").get<double>();
  s.image_width = j.at("image_width").get<int>();
  s.image_height = j.at("image_height").get<int>();
  s.standoff_mm = j.at("standoff_mm").get<double>();
  s.intrinsics = j.at("intrinsics").get<CameraIntrinsics>();
}

}  // namespace crackscan
