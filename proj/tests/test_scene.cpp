#include <cmath>
#include <limits>

#include "crackscan/scene.hpp"
#include "doctest.h"

using namespace crackscan;

namespace {

// Test-local distance oracle: explicit point-to-segment projection, kept
// separate from the library's helper.
double oracle_point_to_polyline(double x, double y, const std::vector<Point3>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double ax = poly[i].x, ay = poly[i].y;
    const double bx = poly[i + 1].x, by = poly[i + 1].y;
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((x - ax) * vx + (y - ay) * vy) / len2 : 0.0;
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    const double dx = x - (ax + t * vx), dy = y - (ay + t * vy);
    best = std::min(best, std::sqrt(dx * dx + dy * dy));
  }
  return best;
}

CrackScene single_crack_scene(CrackKind kind) {
  CrackScene scene;
  scene.plate_width_mm = 40.0;
  scene.plate_height_mm = 30.0;
  scene.plate_thickness_mm = 10.0;
  CrackPath crack;
  crack.kind = kind;
  crack.width_mm = 2.0;
  crack.depth_mm = kind == CrackKind::real ? 2.0 : 0.0;
  crack.polyline = {{10.0, 15.0, 10.0, Frame::world}, {30.0, 15.0, 10.0, Frame::world}};
  scene.cracks.push_back(crack);
  scene.validate();
  return scene;
}

}  // namespace

TEST_SUITE("scene") {
  TEST_CASE("generation is deterministic for a fixed seed") {
    const SceneGenParams params;
    const CrackScene a = generate_random_scene(7, params);
    const CrackScene b = generate_random_scene(7, params);
    CHECK(nlohmann::json(a) == nlohmann::json(b));
    const CrackScene c = generate_random_scene(8, params);
    CHECK(nlohmann::json(a) != nlohmann::json(c));
  }

  TEST_CASE("crack counts are honoured") {
    SceneGenParams params;
    params.n_real = 0;
    params.n_fake = 0;
    CHECK(generate_random_scene(1, params).cracks.empty());

    params.n_real = 3;
    params.n_fake = 2;
    const CrackScene scene = generate_random_scene(1, params);
    int real = 0, painted = 0;
    for (const auto& c : scene.cracks) (c.kind == CrackKind::real ? real : painted)++;
    CHECK(real == 3);
    CHECK(painted == 2);
    for (const auto& c : scene.cracks) {
      if (c.kind == CrackKind::real) CHECK(c.depth_mm > 0.0);
      if (c.kind == CrackKind::painted) CHECK(c.depth_mm == 0.0);
    }
  }

  TEST_CASE("impossible placements fail after bounded attempts") {
    SceneGenParams params;
    params.n_real = 200;  // cannot keep 12 mm separation on the default plate
    CHECK_THROWS_AS(generate_random_scene(1, params), std::runtime_error);
  }

  TEST_CASE("blank plate renders uniformly") {
    CrackScene scene;
    scene.plate_width_mm = 20.0;
    scene.plate_height_mm = 10.0;
    const RasterImage img = render_top_view(scene, 0.5);
    for (const double v : img.pixels) CHECK(v == scene.background_albedo);
    const RasterImage depth = render_depth(scene, 0.5);
    for (const double v : depth.pixels) CHECK(v == scene.plate_top());
    const RasterImage mask = ground_truth_mask(scene, 0.5, true);
    CHECK(mask.count_nonzero() == 0);
  }

  TEST_CASE("noiseless render matches the per-pixel distance oracle") {
    const CrackScene scene = single_crack_scene(CrackKind::real);
    const double mm_per_px = 0.5;
    const RasterImage img = render_top_view(scene, mm_per_px);
    for (int row = 0; row < img.height; ++row) {
      for (int col = 0; col < img.width; ++col) {
        const double x = col * mm_per_px;
        const double y = row * mm_per_px;
        const bool dark = oracle_point_to_polyline(x, y, scene.cracks[0].polyline) <= 1.0;
        CHECK(img.at(row, col) == (dark ? scene.crack_albedo : scene.background_albedo));
      }
    }
  }

  TEST_CASE("painted and real cracks look identical from above") {
    const RasterImage real = render_top_view(single_crack_scene(CrackKind::real), 0.5);
    const RasterImage painted = render_top_view(single_crack_scene(CrackKind::painted), 0.5);
    CHECK(real.pixels == painted.pixels);
  }

  TEST_CASE("depth responds to grooves but not paint") {
    const CrackScene real = single_crack_scene(CrackKind::real);
    const RasterImage depth = render_depth(real, 0.5);
    double min_depth = 1e9;
    for (const double v : depth.pixels) min_depth = std::min(min_depth, v);
    CHECK(min_depth == doctest::Approx(real.plate_top() - 2.0));

    const RasterImage painted_depth = render_depth(single_crack_scene(CrackKind::painted), 0.5);
    for (const double v : painted_depth.pixels) CHECK(v == real.plate_top());
  }

  TEST_CASE("ground truth masks follow the kind filter") {
    const CrackScene painted = single_crack_scene(CrackKind::painted);
    CHECK(ground_truth_mask(painted, 0.5, false).count_nonzero() == 0);
    CHECK(ground_truth_mask(painted, 0.5, true).count_nonzero() > 0);

    const CrackScene real = single_crack_scene(CrackKind::real);
    const RasterImage mask = ground_truth_mask(real, 0.5, true);
    const RasterImage render = render_top_view(real, 0.5);
    for (std::size_t i = 0; i < mask.size(); ++i)
      CHECK((mask.pixels[i] != 0.0) == (render.pixels[i] == real.crack_albedo));
  }

  TEST_CASE("renders are bit-identical across calls") {
    const CrackScene scene = generate_random_scene(3, SceneGenParams{});
    CHECK(render_top_view(scene, 0.5, 0.05).pixels == render_top_view(scene, 0.5, 0.05).pixels);
    CHECK(render_depth(scene, 0.5, 0.3).pixels == render_depth(scene, 0.5, 0.3).pixels);
  }

  TEST_CASE("groove outline points sit half a width from the centreline") {
    const CrackScene scene = generate_random_scene(21, SceneGenParams{});
    const auto outlines = crack_boundary_polylines(scene);
    std::size_t ring_index = 0;
    std::vector<const CrackPath*> real_cracks;
    for (const auto& c : scene.cracks)
      if (c.kind == CrackKind::real) real_cracks.push_back(&c);
    REQUIRE(outlines.size() == real_cracks.size());
    for (const auto& ring : outlines) {
      const CrackPath& crack = *real_cracks[ring_index++];
      CHECK(ring.front().x == ring.back().x);
      CHECK(ring.front().y == ring.back().y);
      for (const auto& p : ring) {
        const double d = oracle_point_to_polyline(p.x, p.y, crack.polyline);
        CHECK(std::abs(d - crack.width_mm / 2.0) < 1e-9);
        CHECK(p.z == scene.plate_top());
      }
    }
  }

  TEST_CASE("centreline truth mirrors the real crack polylines") {
    const CrackScene scene = generate_random_scene(4, SceneGenParams{});
    const auto centerlines = crack_centerline_polylines(scene);
    std::size_t real_count = 0;
    for (const auto& c : scene.cracks)
      if (c.kind == CrackKind::real) ++real_count;
    CHECK(centerlines.size() == real_count);
  }

  TEST_CASE("scene JSON round-trips") {
    const CrackScene scene = generate_random_scene(13, SceneGenParams{});
    const CrackScene back = nlohmann::json(scene).get<CrackScene>();
    CHECK(nlohmann::json(back) == nlohmann::json(scene));
  }

  TEST_CASE("validation rejects malformed scenes") {
    CrackScene scene = single_crack_scene(CrackKind::real);
    scene.cracks[0].depth_mm = 0.0;
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);

    scene = single_crack_scene(CrackKind::painted);
    scene.cracks[0].depth_mm = 1.0;
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);

    scene = single_crack_scene(CrackKind::real);
    scene.cracks[0].polyline.push_back({999.0, 0.0, 10.0, Frame::world});
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);

    scene = single_crack_scene(CrackKind::real);
    scene.background_albedo = 1.5;
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
  }
}
