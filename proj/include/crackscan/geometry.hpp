#pragma once

#include <Eigen/Dense>
#include <string>

#include "json.hpp"

namespace crackscan {

// Coordinate frames used across the pipeline. All spatial quantities are in
// millimetres.
enum class Frame { sensor, end_effector, world };

std::string to_string(Frame f);
Frame frame_from_string(const std::string& s);

/// Continuous image position: u is the column, v is the row.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

/// 3D point in millimetres, tagged with the frame it is expressed in.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  Frame frame = Frame::world;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from_vec(const Eigen::Vector3d& v, Frame f) {
    return {v.x(), v.y(), v.z(), f};
  }
};

/// Rigid motion. rotation must be orthonormal with determinant +1; both are
/// checked by valid() to 1e-9.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Frame from = Frame::world;
  Frame to = Frame::world;

  bool valid(double tol = 1e-9) const;

  static RigidTransform identity(Frame f = Frame::world) {
    return RigidTransform{Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), f, f};
  }
  static RigidTransform translate(double x, double y, double z,
                                  Frame from = Frame::world, Frame to = Frame::world) {
    return RigidTransform{Eigen::Matrix3d::Identity(), {x, y, z}, from, to};
  }
  static RigidTransform rotate_z(double angle_rad,
                                 Frame from = Frame::world, Frame to = Frame::world);
};

/// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
};

/// Geometric model of the optical tactile sensor: a pinhole camera behind a
/// flat elastomer plane at z = standoff_mm, imaging a rectangular view patch.
struct SensorModel {
  double view_width_mm = 14.0;
  double view_height_mm = 10.5;
  int image_width = 640;
  int image_height = 480;
  double standoff_mm = 20.0;  // optical centre to elastomer surface
  CameraIntrinsics intrinsics;

  double pixel_pitch_x() const { return view_width_mm / image_width; }
  double pixel_pitch_y() const { return view_height_mm / image_height; }

  /// Default sensor: 640x480 raster over a 14 x 10.5 mm view at 20 mm
  /// standoff. Pixel pitch is about 22 microns.
  static SensorModel standard();

  /// Throws std::invalid_argument when intrinsics and view size disagree.
  void validate() const;
};

/// Pinhole projection of a sensor-frame point onto the tactile image.
/// Throws std::domain_error when p.z <= 0.
PixelPoint project_sensor_to_image(const Point3& p, const SensorModel& s);

/// Unique point on the elastomer plane (z = standoff) projecting to px.
Point3 backproject_image_to_sensor(const PixelPoint& px, const SensorModel& s);

Point3 transform_point(const Point3& p, const RigidTransform& t);

/// World position of a sensor-frame point through the sensor-to-end-effector
/// and end-effector-to-world transforms.
Point3 sensor_point_to_world(const Point3& p, const RigidTransform& sensor_to_ee,
                             const RigidTransform& ee_to_world);

/// compose(outer, inner) applies inner first: result = outer * inner.
RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner);
RigidTransform invert(const RigidTransform& t);

// Planar distance helpers shared by the scene and tactile simulators.
double point_segment_distance_2d(double px, double py, double ax, double ay,
                                 double bx, double by);
double point_segment_distance_3d(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                 const Eigen::Vector3d& b);

// JSON layout: matrices row-major, translations [x, y, z] in mm.
void to_json(nlohmann::json& j, const PixelPoint& p);
void from_json(const nlohmann::json& j, PixelPoint& p);
void to_json(nlohmann::json& j, const Point3& p);
void from_json(const nlohmann::json& j, Point3& p);
void to_json(nlohmann::json& j, const RigidTransform& t);
void from_json(const nlohmann::json& j, RigidTransform& t);
void to_json(nlohmann::json& j, const CameraIntrinsics& k);
void from_json(const nlohmann::json& j, CameraIntrinsics& k);
void to_json(nlohmann::json& j, const SensorModel& s);
void from_json(const nlohmann::json& j, SensorModel& s);

}  // namespace crackscan
