#include "crackscan/skeleton.hpp"

#include <array>
#include <deque>
#include <fstream>
#include <set>
#include <stdexcept>

namespace crackscan {

namespace {

// 8-neighbourhood ring, clockwise from north:
//   7 0 1
//   6 . 2
//   5 4 3
// Even indices are 4-adjacent to the centre, odd indices are diagonal.
// Ring-consecutive cells are mutually 4-adjacent, so a run of consecutive set
// cells forms one 4-connected group.
constexpr std::array<std::array<int, 2>, 8> kRing = {
    {{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

bool on_at(const RasterImage& img, int row, int col) {
  return img.in_bounds(row, col) && img.on(row, col);
}

void require_binary(const RasterImage& img, const char* what) {
  if (img.channels != Channels::binary)
    throw std::invalid_argument(std::string(what) + " expects a binary raster");
}

// One 4-connected run of set ring cells.
struct NeighborRun {
  std::vector<Pixel> members;  // in ring order
  // Stepping representative: the run's single 4-adjacent member when present
  // (a run with two 4-adjacent members would imply a solid 2x2 block).
  Pixel rep;
};

std::vector<NeighborRun> neighbor_runs(const RasterImage& img, int row, int col) {
  std::array<bool, 8> set{};
  int count = 0;
  for (int i = 0; i < 8; ++i) {
    set[i] = on_at(img, row + kRing[i][0], col + kRing[i][1]);
    count += set[i] ? 1 : 0;
  }
  std::vector<NeighborRun> runs;
  if (count == 0) return runs;
  if (count == 8) {
    NeighborRun run;
    for (int i = 0; i < 8; ++i)
      run.members.push_back({row + kRing[i][0], col + kRing[i][1]});
    run.rep = run.members[0];
    runs.push_back(std::move(run));
    return runs;
  }
  // Start after a gap so runs never wrap.
  int start = 0;
  while (set[start]) start = (start + 1) % 8;
  for (int k = 0; k < 8; ++k) {
    const int i = (start + k) % 8;
    if (!set[i]) continue;
    NeighborRun run;
    int j = i;
    int steps = k;
    while (steps < 8 && set[(start + steps) % 8]) {
      j = (start + steps) % 8;
      run.members.push_back({row + kRing[j][0], col + kRing[j][1]});
      ++steps;
    }
    run.rep = run.members.front();
    for (std::size_t m = 0; m < run.members.size(); ++m) {
      const int idx = (start + k + static_cast<int>(m)) % 8;
      if (idx % 2 == 0) {
        run.rep = run.members[m];
        break;
      }
    }
    runs.push_back(std::move(run));
    k = steps;  // skip past this run; loop ++k steps over the gap
  }
  return runs;
}

bool run_contains(const NeighborRun& run, const Pixel& p) {
  for (const auto& m : run.members)
    if (m == p) return true;
  return false;
}

struct ThinWorkspace {
  std::vector<int> labels;
  std::vector<int> label_sizes;
  std::vector<int> marked_per_label;
};

// 8-connected labelling of set pixels; returns the number of components.
int label_components(const RasterImage& img, std::vector<int>* labels) {
  labels->assign(img.size(), -1);
  int next = 0;
  std::deque<Pixel> queue;
  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      if (!img.on(row, col) || (*labels)[static_cast<std::size_t>(row) * img.width + col] >= 0)
        continue;
      queue.push_back({row, col});
      (*labels)[static_cast<std::size_t>(row) * img.width + col] = next;
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        for (const auto& d : kRing) {
          const int r = p.row + d[0];
          const int c = p.col + d[1];
          if (!on_at(img, r, c)) continue;
          auto& lab = (*labels)[static_cast<std::size_t>(r) * img.width + c];
          if (lab < 0) {
            lab = next;
            queue.push_back({r, c});
          }
        }
      }
      ++next;
    }
  }
  return next;
}

}  // namespace

int count_components_8(const RasterImage& mask) {
  require_binary(mask, "count_components_8");
  std::vector<int> labels;
  return label_components(mask, &labels);
}

RasterImage thin(const RasterImage& mask) {
  require_binary(mask, "thin");
  RasterImage img = mask;

  const auto neighbor_bits = [&img](int row, int col, int p[8]) {
    for (int i = 0; i < 8; ++i)
      p[i] = on_at(img, row + kRing[i][0], col + kRing[i][1]) ? 1 : 0;
  };

  bool changed = true;
  std::vector<Pixel> marked;
  std::vector<int> labels;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
          if (!img.on(row, col)) continue;
          int p[8];  // ring order: N NE E SE S SW W NW
          neighbor_bits(row, col, p);
          const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
          if (b < 2 || b > 6) continue;
          int transitions = 0;
          for (int i = 0; i < 8; ++i)
            if (p[i] == 0 && p[(i + 1) % 8] == 1) ++transitions;
          if (transitions != 1) continue;
          // N=p[0] E=p[2] S=p[4] W=p[6]
          if (pass == 0) {
            if (p[0] && p[2] && p[4]) continue;
            if (p[2] && p[4] && p[6]) continue;
          } else {
            if (p[0] && p[2] && p[6]) continue;
            if (p[0] && p[4] && p[6]) continue;
          }
          marked.push_back({row, col});
        }
      }
      if (marked.empty()) continue;

      // A component may not vanish: when a sub-iteration marks all of its
      // pixels, its lexicographically smallest marked pixel survives.
      const int n_labels = label_components(img, &labels);
      std::vector<int> sizes(n_labels, 0), hits(n_labels, 0);
      for (std::size_t i = 0; i < img.size(); ++i)
        if (labels[i] >= 0) ++sizes[labels[i]];
      for (const auto& p : marked)
        ++hits[labels[static_cast<std::size_t>(p.row) * img.width + p.col]];
      std::vector<bool> spared(n_labels, false);
      for (const auto& p : marked) {
        const int lab = labels[static_cast<std::size_t>(p.row) * img.width + p.col];
        if (hits[lab] == sizes[lab] && !spared[lab]) {
          spared[lab] = true;  // marked pixels come in scan order; keep the first
          continue;
        }
        img.at(p.row, p.col) = 0.0;
        changed = true;
      }
    }
  }
  return img;
}

int incident_branches(const RasterImage& skeleton, int row, int col) {
  return static_cast<int>(neighbor_runs(skeleton, row, col).size());
}

SkeletonGraph extract_graph(const RasterImage& skeleton) {
  require_binary(skeleton, "extract_graph");
  for (int row = 0; row + 1 < skeleton.height; ++row) {
    for (int col = 0; col + 1 < skeleton.width; ++col) {
      if (skeleton.on(row, col) && skeleton.on(row, col + 1) && skeleton.on(row + 1, col) &&
          skeleton.on(row + 1, col + 1)) {
        throw std::invalid_argument("not a skeleton: solid 2x2 block at row " +
                                    std::to_string(row) + ", col " + std::to_string(col));
      }
    }
  }

  SkeletonGraph graph;
  graph.skeleton = skeleton;

  std::vector<bool> keypoint(skeleton.size(), false);
  std::vector<Pixel> keypoints;
  for (int row = 0; row < skeleton.height; ++row) {
    for (int col = 0; col < skeleton.width; ++col) {
      if (!skeleton.on(row, col)) continue;
      const int branches = incident_branches(skeleton, row, col);
      if (branches == 2) continue;
      keypoint[static_cast<std::size_t>(row) * skeleton.width + col] = true;
      keypoints.push_back({row, col});
      if (branches < 2)
        graph.end_points.push_back({row, col});
      else
        graph.branch_points.push_back({row, col});
    }
  }

  const auto is_keypoint = [&](const Pixel& p) {
    return keypoint[static_cast<std::size_t>(p.row) * skeleton.width + p.col];
  };
  std::vector<bool> visited(skeleton.size(), false);
  const auto mark_visited = [&](const Pixel& p) {
    visited[static_cast<std::size_t>(p.row) * skeleton.width + p.col] = true;
  };
  const auto was_visited = [&](const Pixel& p) {
    return visited[static_cast<std::size_t>(p.row) * skeleton.width + p.col];
  };

  // Steps from cur (interior, two incident runs) to the pixel on the side
  // away from prev.
  const auto step_away = [&](const Pixel& prev, const Pixel& cur) {
    const auto runs = neighbor_runs(skeleton, cur.row, cur.col);
    for (const auto& run : runs) {
      if (!run_contains(run, prev)) return run.rep;
    }
    return prev;  // unreachable on well-formed input
  };

  std::set<std::pair<Pixel, Pixel>> direct_pairs;
  for (const auto& kp : keypoints) {
    auto runs = neighbor_runs(skeleton, kp.row, kp.col);
    std::sort(runs.begin(), runs.end(),
              [](const NeighborRun& a, const NeighborRun& b) { return a.rep < b.rep; });
    for (const auto& run : runs) {
      const Pixel first = run.rep;
      if (is_keypoint(first)) {
        const auto pair = std::minmax(kp, first);
        if (direct_pairs.emplace(pair.first, pair.second).second)
          graph.edges.push_back({{kp, first}, false});
        continue;
      }
      if (was_visited(first)) continue;

      SkeletonGraph::Edge edge;
      edge.pixels = {kp, first};
      mark_visited(first);
      Pixel prev = kp;
      Pixel cur = first;
      while (true) {
        const Pixel next = step_away(prev, cur);
        edge.pixels.push_back(next);
        if (is_keypoint(next)) break;
        if (was_visited(next)) break;  // guards against malformed input
        mark_visited(next);
        prev = cur;
        cur = next;
      }
      graph.edges.push_back(std::move(edge));
    }
  }

  // Remaining pixels belong to keypoint-free cycles.
  for (int row = 0; row < skeleton.height; ++row) {
    for (int col = 0; col < skeleton.width; ++col) {
      const Pixel start{row, col};
      if (!skeleton.on(row, col) || is_keypoint(start) || was_visited(start)) continue;
      SkeletonGraph::Edge edge;
      edge.closed = true;
      edge.pixels = {start};
      mark_visited(start);
      auto runs = neighbor_runs(skeleton, row, col);
      Pixel cur = runs[0].rep;
      if (runs.size() > 1 && runs[1].rep < cur) cur = runs[1].rep;
      Pixel prev = start;
      while (cur != start) {
        edge.pixels.push_back(cur);
        mark_visited(cur);
        const Pixel next = step_away(prev, cur);
        prev = cur;
        cur = next;
      }
      graph.edges.push_back(std::move(edge));
    }
  }
  return graph;
}

RasterImage prune_spurs(const RasterImage& skeleton, int min_length_px) {
  if (min_length_px <= 0) return skeleton;
  const SkeletonGraph graph = extract_graph(skeleton);

  std::set<Pixel> branch_set(graph.branch_points.begin(), graph.branch_points.end());
  RasterImage out = skeleton;
  for (const auto& edge : graph.edges) {
    if (edge.closed || edge.pixels.size() >= static_cast<std::size_t>(min_length_px)) continue;
    const bool front_branch = branch_set.count(edge.pixels.front()) > 0;
    const bool back_branch = branch_set.count(edge.pixels.back()) > 0;
    if (front_branch == back_branch) continue;  // spur = branch point on one side only
    for (const auto& p : edge.pixels) {
      if (branch_set.count(p)) continue;
      out.at(p.row, p.col) = 0.0;
    }
  }
  return out;
}

nlohmann::json graph_to_json(const SkeletonGraph& graph) {
  const auto pixel_array = [](const std::vector<Pixel>& pixels) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pixels) arr.push_back({p.row, p.col});
    return arr;
  };
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& edge : graph.edges)
    edges.push_back({{"closed", edge.closed}, {"pixels_row_col", pixel_array(edge.pixels)}});
  return nlohmann::json{{"width", graph.skeleton.width},
                        {"height", graph.skeleton.height},
                        {"scale_mm_per_px", graph.skeleton.scale_mm_per_px},
                        {"origin", graph.skeleton.origin},
                        {"end_points_row_col", pixel_array(graph.end_points)},
                        {"branch_points_row_col", pixel_array(graph.branch_points)},
                        {"edges", edges}};
}

SkeletonGraph graph_from_json(const nlohmann::json& j) {
  const auto read_pixels = [](const nlohmann::json& arr) {
    std::vector<Pixel> out;
    for (const auto& p : arr) out.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return out;
  };
  SkeletonGraph graph;
  graph.skeleton =
      RasterImage::make(j.at("width").get<int>(), j.at("height").get<int>(), Channels::binary);
  graph.skeleton.scale_mm_per_px = j.at("scale_mm_per_px").get<double>();
  graph.skeleton.origin = j.at("origin").get<Point3>();
  graph.end_points = read_pixels(j.at("end_points_row_col"));
  graph.branch_points = read_pixels(j.at("branch_points_row_col"));
  for (const auto& e : j.at("edges")) {
    SkeletonGraph::Edge edge;
    edge.closed = e.at("closed").get<bool>();
    edge.pixels = read_pixels(e.at("pixels_row_col"));
    graph.edges.push_back(std::move(edge));
  }
  for (const auto& edge : graph.edges)
    for (const auto& p : edge.pixels) graph.skeleton.at(p.row, p.col) = 1.0;
  for (const auto& p : graph.end_points) graph.skeleton.at(p.row, p.col) = 1.0;
  for (const auto& p : graph.branch_points) graph.skeleton.at(p.row, p.col) = 1.0;
  return graph;
}

void save_graph(const SkeletonGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open graph file for writing: " + path);
  out << graph_to_json(graph).dump(2) << "\n";
}

SkeletonGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid graph file " + path + ": " + e.what());
  }
  return graph_from_json(j);
}

}  // namespace crackscan
