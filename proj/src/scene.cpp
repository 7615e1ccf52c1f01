#include "crackscan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "crackscan/rng.hpp"

namespace crackscan {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kArcStepRad = 5.0 * kPi / 180.0;

// Distinct noise streams derived from one scene seed.
constexpr std::uint64_t kVisualNoiseSalt = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kDepthNoiseSalt = 0xc2b2ae3d27d4eb4full;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 normalized(Vec2 v) {
  const double n = std::hypot(v.x, v.y);
  return {v.x / n, v.y / n};
}

double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                const Vec2& b1) {
  // Proper intersection means distance zero.
  const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  };
  const double d1 = orient(a0, a1, b0);
  const double d2 = orient(a0, a1, b1);
  const double d3 = orient(b0, b1, a0);
  const double d4 = orient(b0, b1, a1);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
  double best = point_segment_distance_2d(b0.x, b0.y, a0.x, a0.y, a1.x, a1.y);
  best = std::min(best, point_segment_distance_2d(b1.x, b1.y, a0.x, a0.y, a1.x, a1.y));
  best = std::min(best, point_segment_distance_2d(a0.x, a0.y, b0.x, b0.y, b1.x, b1.y));
  best = std::min(best, point_segment_distance_2d(a1.x, a1.y, b0.x, b0.y, b1.x, b1.y));
  return best;
}

double polyline_polyline_distance(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      best = std::min(best, segment_segment_distance({a[i].x, a[i].y}, {a[i + 1].x, a[i + 1].y},
                                                     {b[j].x, b[j].y}, {b[j + 1].x, b[j + 1].y}));
    }
  }
  return best;
}

struct Bounds {
  double min_x, min_y, max_x, max_y;
};

Bounds crack_bounds(const CrackPath& crack) {
  Bounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : crack.polyline) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  const double r = crack.width_mm / 2.0;
  b.min_x -= r;
  b.min_y -= r;
  b.max_x += r;
  b.max_y += r;
  return b;
}

/// Index of the crack covering world (x, y), or -1. Real cracks win ties.
int covering_crack(const CrackScene& scene, const std::vector<Bounds>& bounds, double x,
                   double y, bool include_painted) {
  int painted_hit = -1;
  for (std::size_t i = 0; i < scene.cracks.size(); ++i) {
    const auto& crack = scene.cracks[i];
    if (crack.kind == CrackKind::painted && !include_painted) continue;
    const auto& b = bounds[i];
    if (x < b.min_x || x > b.max_x || y < b.min_y || y > b.max_y) continue;
    if (distance_to_crack(crack, x, y) <= crack.width_mm / 2.0) {
      if (crack.kind == CrackKind::real) return static_cast<int>(i);
      if (painted_hit < 0) painted_hit = static_cast<int>(i);
    }
  }
  return painted_hit;
}

RasterImage make_plate_raster(const CrackScene& scene, double mm_per_px, Channels ch) {
  if (!(mm_per_px > 0.0)) throw std::invalid_argument("mm_per_px must be positive");
  const int width = static_cast<int>(std::ceil(scene.plate_width_mm / mm_per_px));
  const int height = static_cast<int>(std::ceil(scene.plate_height_mm / mm_per_px));
  RasterImage img = RasterImage::make(width, height, ch);
  img.scale_mm_per_px = mm_per_px;
  img.origin = {0.0, 0.0, scene.plate_top(), Frame::world};
  return img;
}

// One side of the offset outline: the left offset of the polyline at radius r,
// with arc joins on convex turns and trimmed (miter) joins on concave turns.
void emit_offset_side(const std::vector<Point3>& poly, double r, double z,
                      std::vector<Point3>* out) {
  const std::size_t nseg = poly.size() - 1;
  std::vector<Vec2> dir(nseg), nrm(nseg);
  for (std::size_t i = 0; i < nseg; ++i) {
    dir[i] = normalized({poly[i + 1].x - poly[i].x, poly[i + 1].y - poly[i].y});
    nrm[i] = {-dir[i].y, dir[i].x};
  }
  out->push_back({poly[0].x + r * nrm[0].x, poly[0].y + r * nrm[0].y, z, Frame::world});
  for (std::size_t i = 0; i + 1 < nseg; ++i) {
    const auto& v = poly[i + 1];
    const double cross = dir[i].x * dir[i + 1].y - dir[i].y * dir[i + 1].x;
    if (cross < -1e-12) {
      // Convex on this side: corner point, then the vertex arc over to nrm[i+1].
      out->push_back({v.x + r * nrm[i].x, v.y + r * nrm[i].y, z, Frame::world});
      const double a0 = std::atan2(nrm[i].y, nrm[i].x);
      double a1 = std::atan2(nrm[i + 1].y, nrm[i + 1].x);
      while (a1 > a0) a1 -= 2.0 * kPi;
      const int steps = std::max(1, static_cast<int>(std::ceil((a0 - a1) / kArcStepRad)));
      for (int k = 1; k <= steps; ++k) {
        const double a = a0 + (a1 - a0) * k / steps;
        out->push_back({v.x + r * std::cos(a), v.y + r * std::sin(a), z, Frame::world});
      }
    } else if (cross > 1e-12) {
      // Concave: the two offset lines meet at the bisector point; the raw
      // corner points lie inside the union and stay out of the outline.
      const Vec2 m = normalized({nrm[i].x + nrm[i + 1].x, nrm[i].y + nrm[i + 1].y});
      const double scale = r / (m.x * nrm[i].x + m.y * nrm[i].y);
      out->push_back({v.x + scale * m.x, v.y + scale * m.y, z, Frame::world});
    } else {
      out->push_back({v.x + r * nrm[i].x, v.y + r * nrm[i].y, z, Frame::world});
    }
  }
  const auto& last = poly.back();
  out->push_back(
      {last.x + r * nrm[nseg - 1].x, last.y + r * nrm[nseg - 1].y, z, Frame::world});
}

void emit_cap(const Vec2& center, const Vec2& from_nrm, double r, double z,
              std::vector<Point3>* out) {
  const double a0 = std::atan2(from_nrm.y, from_nrm.x);
  const int steps = static_cast<int>(std::ceil(kPi / kArcStepRad));
  for (int k = 1; k < steps; ++k) {
    const double a = a0 - kPi * k / steps;
    out->push_back({center.x + r * std::cos(a), center.y + r * std::sin(a), z, Frame::world});
  }
}

}  // namespace

std::string to_string(CrackKind k) { return k == CrackKind::real ? "real" : "painted"; }

CrackKind crack_kind_from_string(const std::string& s) {
  if (s == "real") return CrackKind::real;
  if (s == "painted") return CrackKind::painted;
  throw std::invalid_argument("unknown crack kind: " + s);
}

void CrackScene::validate() const {
  const auto check_albedo = [](double a, const char* name) {
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument(std::string(name) + " albedo must be in [0, 1]");
  };
  check_albedo(background_albedo, "background");
  check_albedo(crack_albedo, "crack");
  check_albedo(paint_albedo, "paint");
  for (const auto& crack : cracks) {
    if (crack.polyline.size() < 2)
      throw std::invalid_argument("crack polyline needs at least two points");
    if (!(crack.width_mm > 0.0)) throw std::invalid_argument("crack width must be positive");
    if (crack.kind == CrackKind::real && !(crack.depth_mm > 0.0))
      throw std::invalid_argument("real crack needs positive depth");
    if (crack.kind == CrackKind::painted && crack.depth_mm != 0.0)
      throw std::invalid_argument("painted crack must have zero depth");
    for (std::size_t i = 0; i < crack.polyline.size(); ++i) {
      const auto& p = crack.polyline[i];
      if (p.x < 0.0 || p.x > plate_width_mm || p.y < 0.0 || p.y > plate_height_mm)
        throw std::invalid_argument("crack polyline leaves the plate");
      if (i > 0) {
        const auto& q = crack.polyline[i - 1];
        if (p.x == q.x && p.y == q.y && p.z == q.z)
          throw std::invalid_argument("crack polyline has repeated consecutive points");
      }
    }
  }
}

double distance_to_crack(const CrackPath& crack, double x, double y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < crack.polyline.size(); ++i) {
    const auto& a = crack.polyline[i];
    const auto& b = crack.polyline[i + 1];
    best = std::min(best, point_segment_distance_2d(x, y, a.x, a.y, b.x, b.y));
  }
  return best;
}

CrackScene generate_random_scene(std::uint64_t seed, const SceneGenParams& params) {
  if (params.n_real < 0 || params.n_fake < 0)
    throw std::invalid_argument("crack counts must be non-negative");
  if (!(params.width_min_mm > 0.0) || params.width_max_mm < params.width_min_mm ||
      !(params.depth_min_mm > 0.0) || params.depth_max_mm < params.depth_min_mm ||
      !(params.length_min_mm > 0.0) || params.length_max_mm < params.length_min_mm)
    throw std::invalid_argument("generator ranges must be positive and ordered");

  CrackScene scene;
  scene.plate_width_mm = params.plate_width_mm;
  scene.plate_height_mm = params.plate_height_mm;
  scene.plate_thickness_mm = params.plate_thickness_mm;
  scene.rng_seed = seed;

  Rng rng(seed);
  const double z = scene.plate_top();
  const int total = params.n_real + params.n_fake;
  for (int k = 0; k < total; ++k) {
    const bool real = k < params.n_real;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      CrackPath crack;
      crack.kind = real ? CrackKind::real : CrackKind::painted;
      crack.width_mm = rng.uniform(params.width_min_mm, params.width_max_mm);
      crack.depth_mm = real ? rng.uniform(params.depth_min_mm, params.depth_max_mm) : 0.0;
      const double length = rng.uniform(params.length_min_mm, params.length_max_mm);
      double heading = rng.uniform(0.0, 2.0 * kPi);
      double x = rng.uniform(params.margin_mm, params.plate_width_mm - params.margin_mm);
      double y = rng.uniform(params.margin_mm, params.plate_height_mm - params.margin_mm);
      crack.polyline.push_back({x, y, z, Frame::world});
      double remaining = length;
      while (remaining > 1e-9) {
        const double step = std::min(params.step_mm, remaining);
        x += step * std::cos(heading);
        y += step * std::sin(heading);
        crack.polyline.push_back({x, y, z, Frame::world});
        heading += rng.uniform(-params.max_turn_rad, params.max_turn_rad);
        remaining -= step;
      }

      bool ok = true;
      for (const auto& p : crack.polyline) {
        if (p.x < params.margin_mm || p.x > params.plate_width_mm - params.margin_mm ||
            p.y < params.margin_mm || p.y > params.plate_height_mm - params.margin_mm) {
          ok = false;
          break;
        }
      }
      for (const auto& other : scene.cracks) {
        if (!ok) break;
        if (polyline_polyline_distance(crack.polyline, other.polyline) < params.separation_mm)
          ok = false;
      }
      if (ok) {
        scene.cracks.push_back(std::move(crack));
        placed = true;
      }
    }
    if (!placed)
      throw std::runtime_error("scene generation failed: could not place crack " +
                               std::to_string(k) + " after 1000 attempts");
  }
  scene.validate();
  return scene;
}

RasterImage render_top_view(const CrackScene& scene, double mm_per_px, double noise_sigma) {
  RasterImage img = make_plate_raster(scene, mm_per_px, Channels::grayscale);
  std::vector<Bounds> bounds;
  bounds.reserve(scene.cracks.size());
  for (const auto& c : scene.cracks) bounds.push_back(crack_bounds(c));

  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      const double x = img.origin.x + col * mm_per_px;
      const double y = img.origin.y + row * mm_per_px;
      const int hit = covering_crack(scene, bounds, x, y, /*include_painted=*/true);
      double value = scene.background_albedo;
      if (hit >= 0) {
        value = scene.cracks[hit].kind == CrackKind::real ? scene.crack_albedo
                                                          : scene.paint_albedo;
      }
      img.at(row, col) = value;
    }
  }
  if (noise_sigma > 0.0) {
    Rng noise(scene.rng_seed ^ kVisualNoiseSalt);
    for (double& v : img.pixels) v = std::clamp(v + noise.gaussian(noise_sigma), 0.0, 1.0);
  }
  return img;
}

RasterImage render_depth(const CrackScene& scene, double mm_per_px, double noise_sigma) {
  RasterImage img = make_plate_raster(scene, mm_per_px, Channels::grayscale);
  std::vector<Bounds> bounds;
  bounds.reserve(scene.cracks.size());
  for (const auto& c : scene.cracks) bounds.push_back(crack_bounds(c));

  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      const double x = img.origin.x + col * mm_per_px;
      const double y = img.origin.y + row * mm_per_px;
      const int hit = covering_crack(scene, bounds, x, y, /*include_painted=*/false);
      double value = scene.plate_top();
      if (hit >= 0 && scene.cracks[hit].kind == CrackKind::real)
        value -= scene.cracks[hit].depth_mm;
      img.at(row, col) = value;
    }
  }
  if (noise_sigma > 0.0) {
    Rng noise(scene.rng_seed ^ kDepthNoiseSalt);
    for (double& v : img.pixels) v += noise.gaussian(noise_sigma);
  }
  return img;
}

RasterImage ground_truth_mask(const CrackScene& scene, double mm_per_px, bool include_painted) {
  RasterImage img = make_plate_raster(scene, mm_per_px, Channels::binary);
  std::vector<Bounds> bounds;
  bounds.reserve(scene.cracks.size());
  for (const auto& c : scene.cracks) bounds.push_back(crack_bounds(c));

  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      const double x = img.origin.x + col * mm_per_px;
      const double y = img.origin.y + row * mm_per_px;
      img.at(row, col) = covering_crack(scene, bounds, x, y, include_painted) >= 0 ? 1.0 : 0.0;
    }
  }
  return img;
}

std::vector<std::vector<Point3>> crack_boundary_polylines(const CrackScene& scene) {
  std::vector<std::vector<Point3>> out;
  const double z = scene.plate_top();
  for (const auto& crack : scene.cracks) {
    if (crack.kind != CrackKind::real) continue;
    const double r = crack.width_mm / 2.0;
    const auto& poly = crack.polyline;
    std::vector<Point3> ring;
    emit_offset_side(poly, r, z, &ring);

    const std::size_t nseg = poly.size() - 1;
    const Vec2 end_dir = normalized(
        {poly[nseg].x - poly[nseg - 1].x, poly[nseg].y - poly[nseg - 1].y});
    emit_cap({poly.back().x, poly.back().y}, {-end_dir.y, end_dir.x}, r, z, &ring);

    std::vector<Point3> reversed(poly.rbegin(), poly.rend());
    emit_offset_side(reversed, r, z, &ring);

    const Vec2 start_dir = normalized({poly[1].x - poly[0].x, poly[1].y - poly[0].y});
    emit_cap({poly[0].x, poly[0].y}, {start_dir.y, -start_dir.x}, r, z, &ring);

    ring.push_back(ring.front());  // close the ring
    out.push_back(std::move(ring));
  }
  return out;
}

std::vector<std::vector<Point3>> crack_centerline_polylines(const CrackScene& scene) {
  std::vector<std::vector<Point3>> out;
  for (const auto& crack : scene.cracks) {
    if (crack.kind == CrackKind::real) out.push_back(crack.polyline);
  }
  return out;
}

void to_json(nlohmann::json& j, const CrackPath& c) {
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& p : c.polyline) poly.push_back({p.x, p.y, p.z});
  j = nlohmann::json{{"polyline_mm", poly},
                     {"width_mm", c.width_mm},
                     {"kind", to_string(c.kind)},
                     {"depth_mm", c.depth_mm}};
}

void from_json(const nlohmann::json& j, CrackPath& c) {
  c.polyline.clear();
  for (const auto& p : j.at("polyline_mm"))
    c.polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>(),
                          Frame::world});
  c.width_mm = j.at("width_mm").get<double>();
  c.kind = crack_kind_from_string(j.at("kind").get<std::string>());
  c.depth_mm = j.at("depth_mm").get<double>();
}

void to_json(nlohmann::json& j, const CrackScene& s) {
  j = nlohmann::json{{"plate_width_mm", s.plate_width_mm},
                     {"plate_height_mm", s.plate_height_mm},
                     {"plate_thickness_mm", s.plate_thickness_mm},
                     {"cracks", s.cracks},
                     {"background_albedo", s.background_albedo},
                     {"crack_albedo", s.crack_albedo},
                     {"paint_albedo", s.paint_albedo},
                     {"rng_seed", s.rng_seed}};
}

void from_json(const nlohmann::json& j, CrackScene& s) {
  s.plate_width_mm = j.at("plate_width_mm").get<double>();
  s.plate_height_mm = j.at("plate_height_mm").get<double>();
  s.plate_thickness_mm = j.at("plate_thickness_mm").get<double>();
  s.cracks = j.at("cracks").get<std::vector<CrackPath>>();
  s.background_albedo = j.at("background_albedo").get<double>();
  s.crack_albedo = j.at("crack_albedo").get<double>();
  s.paint_albedo = j.at("paint_albedo").get<double>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
}

void to_json(nlohmann::json& j, const SceneGenParams& p) {
  j = nlohmann::json{{"n_real", p.n_real},
                     {"n_fake", p.n_fake},
                     {"width_min_mm", p.width_min_mm},
                     {"width_max_mm", p.width_max_mm},
                     {"depth_min_mm", p.depth_min_mm},
                     {"depth_max_mm", p.depth_max_mm},
                     {"length_min_mm", p.length_min_mm},
                     {"length_max_mm", p.length_max_mm},
                     {"plate_width_mm", p.plate_width_mm},
                     {"plate_height_mm", p.plate_height_mm},
                     {"plate_thickness_mm", p.plate_thickness_mm},
                     {"margin_mm", p.margin_mm},
                     {"separation_mm", p.separation_mm},
                     {"step_mm", p.step_mm},
                     {"max_turn_rad", p.max_turn_rad}};
}

void from_json(const nlohmann::json& j, SceneGenParams& p) {
  SceneGenParams defaults;
  p.n_real = j.value("n_real", defaults.n_real);
  p.n_fake = j.value("n_fake", defaults.n_fake);
  p.width_min_mm = j.value("width_min_mm", defaults.width_min_mm);
  p.width_max_mm = j.value("width_max_mm", defaults.width_max_mm);
  p.depth_min_mm = j.value("depth_min_mm", defaults.depth_min_mm);
  p.depth_max_mm = j.value("depth_max_mm", defaults.depth_max_mm);
  p.length_min_mm = j.value("length_min_mm", defaults.length_min_mm);
  p.length_max_mm = j.value("length_max_mm", defaults.length_max_mm);
  p.plate_width_mm = j.value("plate_width_mm", defaults.plate_width_mm);
  p.plate_height_mm = j.value("plate_height_mm", defaults.plate_height_mm);
  p.plate_thickness_mm = j.value("plate_thickness_mm", defaults.plate_thickness_mm);
  p.margin_mm = j.value("margin_mm", defaults.margin_mm);
  p.separation_mm = j.value("separation_mm", defaults.separation_mm);
  p.step_mm = j.value("step_mm", defaults.step_mm);
  p.max_turn_rad = j.value("max_turn_rad", defaults.max_turn_rad);
}

void save_scene(const CrackScene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open scene file for writing: " + path);
  out << nlohmann::json(scene).dump(2) << "\n";
}

CrackScene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid scene file " + path + ": " + e.what());
  }
  CrackScene scene = j.get<CrackScene>();
  scene.validate();
  return scene;
}

}  // namespace crackscan
