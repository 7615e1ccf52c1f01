#include <cmath>
#include <random>

#include "crackscan/geometry.hpp"
#include "doctest.h"

using namespace crackscan;

namespace {

// Independent projection oracle: literal 3x4 homogeneous matrix arithmetic,
// z * [u v 1]^T = K * [x y z 1]^T.
PixelPoint project_by_matrix(const Point3& p, const CameraIntrinsics& k) {
  const double K[3][4] = {{k.fx, 0.0, k.u0, 0.0},
                          {0.0, k.fy, k.v0, 0.0},
                          {0.0, 0.0, 1.0, 0.0}};
  const double hom[4] = {p.x, p.y, p.z, 1.0};
  double uvw[3] = {0.0, 0.0, 0.0};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) uvw[r] += K[r][c] * hom[c];
  return {uvw[0] / uvw[2], uvw[1] / uvw[2]};
}

SensorModel test_sensor() {
  SensorModel s = SensorModel::standard();
  s.intrinsics = {1000.0, 1000.0, 320.0, 240.0};
  s.view_width_mm = s.image_width * s.standoff_mm / s.intrinsics.fx;    // 12.8
  s.view_height_mm = s.image_height * s.standoff_mm / s.intrinsics.fy;  // 9.6
  return s;
}

RigidTransform random_transform(std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 3.14159265358979323846);
  Eigen::Vector3d axis{unit(rng), unit(rng), unit(rng)};
  while (axis.norm() < 1e-6) axis = {unit(rng), unit(rng), unit(rng)};
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle(rng), axis.normalized()).toRotationMatrix();
  t.translation = {10.0 * unit(rng), 10.0 * unit(rng), 10.0 * unit(rng)};
  return t;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("optical axis maps to the principal point") {
    const SensorModel s = test_sensor();
    const PixelPoint px = project_sensor_to_image({0.0, 0.0, 20.0, Frame::sensor}, s);
    CHECK(px.u == doctest::Approx(320.0));
    CHECK(px.v == doctest::Approx(240.0));
  }

  TEST_CASE("projection matches matrix arithmetic") {
    const SensorModel s = test_sensor();
    const Point3 p{2.0, 1.0, 20.0, Frame::sensor};
    const PixelPoint px = project_sensor_to_image(p, s);
    CHECK(px.u == doctest::Approx(420.0).epsilon(1e-12));
    CHECK(px.v == doctest::Approx(290.0).epsilon(1e-12));
    const PixelPoint mirror = project_sensor_to_image({-2.0, -1.0, 20.0, Frame::sensor}, s);
    CHECK(mirror.u == doctest::Approx(220.0).epsilon(1e-12));
    CHECK(mirror.v == doctest::Approx(190.0).epsilon(1e-12));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-6.0, 6.0);
    for (int i = 0; i < 200; ++i) {
      const Point3 q{coord(rng), coord(rng), 20.0, Frame::sensor};
      const PixelPoint got = project_sensor_to_image(q, s);
      const PixelPoint want = project_by_matrix(q, s.intrinsics);
      CHECK(got.u == doctest::Approx(want.u).epsilon(1e-12));
      CHECK(got.v == doctest::Approx(want.v).epsilon(1e-12));
    }
  }

  TEST_CASE("points behind the optical centre are not projectable") {
    const SensorModel s = test_sensor();
    CHECK_THROWS_AS(project_sensor_to_image({1.0, 1.0, 0.0, Frame::sensor}, s),
                    std::domain_error);
    CHECK_THROWS_AS(project_sensor_to_image({1.0, 1.0, -5.0, Frame::sensor}, s),
                    std::domain_error);
  }

  TEST_CASE("backprojection lands on the elastomer plane") {
    const SensorModel s = test_sensor();
    const Point3 p = backproject_image_to_sensor({320.0, 240.0}, s);
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(20.0));
    const Point3 q = backproject_image_to_sensor({420.0, 290.0}, s);
    CHECK(q.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("projection round-trip is exact on the standoff plane") {
    const SensorModel s = SensorModel::standard();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 639.0);
    std::uniform_real_distribution<double> v(0.0, 479.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const PixelPoint px{u(rng), v(rng)};
      const Point3 p = backproject_image_to_sensor(px, s);
      const PixelPoint back = project_sensor_to_image(p, s);
      worst = std::max({worst, std::abs(back.u - px.u) * s.pixel_pitch_x(),
                        std::abs(back.v - px.v) * s.pixel_pitch_y()});
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("transform_point basics") {
    const Point3 p{1.0, 0.0, 0.0, Frame::sensor};
    const Point3 same = transform_point(p, RigidTransform::identity());
    CHECK(same.x == doctest::Approx(1.0));

    const Point3 moved = transform_point({0.0, 0.0, 0.0, Frame::world},
                                         RigidTransform::translate(1.0, 2.0, 3.0));
    CHECK(moved.x == doctest::Approx(1.0));
    CHECK(moved.y == doctest::Approx(2.0));
    CHECK(moved.z == doctest::Approx(3.0));

    const Point3 rot = transform_point(p, RigidTransform::rotate_z(3.14159265358979323846 / 2));
    CHECK(std::abs(rot.x) < 1e-12);
    CHECK(std::abs(rot.y - 1.0) < 1e-12);
  }

  TEST_CASE("sensor_point_to_world composes the two transforms") {
    const Point3 origin{0.0, 0.0, 0.0, Frame::sensor};
    const Point3 p = sensor_point_to_world(origin, RigidTransform::translate(0.0, 0.0, 5.0),
                                           RigidTransform::translate(10.0, 0.0, 0.0));
    CHECK(p.x == doctest::Approx(10.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(5.0));
    CHECK(p.frame == Frame::world);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
      const RigidTransform tce = random_transform(rng);
      const RigidTransform tew = random_transform(rng);
      const Point3 q{coord(rng), coord(rng), coord(rng), Frame::sensor};
      const Point3 direct = sensor_point_to_world(q, tce, tew);
      const Point3 chained = transform_point(transform_point(q, tce), tew);
      CHECK(direct.x == doctest::Approx(chained.x).epsilon(1e-12));
      CHECK(direct.y == doctest::Approx(chained.y).epsilon(1e-12));
      CHECK(direct.z == doctest::Approx(chained.z).epsilon(1e-12));
    }
  }

  TEST_CASE("compose and invert round-trip") {
    CHECK(invert(RigidTransform::identity()).rotation.isIdentity(1e-15));
    const RigidTransform inv = invert(RigidTransform::translate(1.0, 2.0, 3.0));
    CHECK(inv.translation.x() == doctest::Approx(-1.0));
    CHECK(inv.translation.y() == doctest::Approx(-2.0));
    CHECK(inv.translation.z() == doctest::Approx(-3.0));

    std::mt19937 rng(17);
    for (int i = 0; i < 100; ++i) {
      const RigidTransform t = random_transform(rng);
      const RigidTransform round = compose(t, invert(t));
      CHECK((round.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(round.translation.cwiseAbs().maxCoeff() < 1e-9);
      CHECK(t.valid());
    }
  }

  TEST_CASE("rigid transforms preserve pairwise distances") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
      const RigidTransform t = random_transform(rng);
      const Point3 a{coord(rng), coord(rng), coord(rng), Frame::world};
      const Point3 b{coord(rng), coord(rng), coord(rng), Frame::world};
      const double before = (a.vec() - b.vec()).norm();
      const double after = (transform_point(a, t).vec() - transform_point(b, t).vec()).norm();
      CHECK(std::abs(before - after) < 1e-9);
    }
  }

  TEST_CASE("default sensor pitch sits in the 20-30 micron band") {
    const SensorModel s = SensorModel::standard();
    s.validate();
    CHECK(s.pixel_pitch_x() >= 0.020);
    CHECK(s.pixel_pitch_x() <= 0.030);
    CHECK(s.pixel_pitch_y() >= 0.020);
    CHECK(s.pixel_pitch_y() <= 0.030);
    CHECK(std::abs(s.view_width_mm - s.image_width * s.standoff_mm / s.intrinsics.fx) < 1e-6);
  }

  TEST_CASE("inconsistent intrinsics are rejected") {
    SensorModel s = SensorModel::standard();
    s.intrinsics.fx = 500.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = SensorModel::standard();
    s.intrinsics.fy = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }

  TEST_CASE("transform and sensor JSON round-trip") {
    std::mt19937 rng(29);
    const RigidTransform t = random_transform(rng);
    const nlohmann::json j = t;
    const RigidTransform back = j.get<RigidTransform>();
    CHECK((back.rotation - t.rotation).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.translation - t.translation).cwiseAbs().maxCoeff() == 0.0);

    const SensorModel s = SensorModel::standard();
    const SensorModel s2 = nlohmann::json(s).get<SensorModel>();
    CHECK(s2.intrinsics.fx == s.intrinsics.fx);
    CHECK(s2.view_width_mm == s.view_width_mm);
    CHECK(s2.image_height == s.image_height);
  }
}
