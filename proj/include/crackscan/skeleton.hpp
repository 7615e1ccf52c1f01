#pragma once

#include <string>
#include <vector>

#include "crackscan/raster.hpp"

namespace crackscan {

/// Keypoint/minimal-edge decomposition of a thinned crack mask.
///
/// A pixel's incident branches are the 4-connected runs of set pixels in its
/// 8-neighbourhood ring; end points have fewer than two, branch points more
/// than two. Minimal edges are maximal paths whose interior pixels have
/// exactly two incident branches. Every skeleton pixel is either a keypoint
/// or interior to exactly one edge; edge pixel lists include their bounding
/// keypoints. Keypoint-free cycles are emitted as closed edges starting at
/// their lexicographically smallest pixel.
struct SkeletonGraph {
  RasterImage skeleton;
  std::vector<Pixel> end_points;
  std::vector<Pixel> branch_points;

  struct Edge {
    std::vector<Pixel> pixels;
    bool closed = false;
  };
  std::vector<Edge> edges;
};

/// Two-subiteration pattern thinning. The skeleton is a subset of the mask,
/// thinning is idempotent, and the number of 8-connected components is
/// preserved (a component about to lose its last pixel keeps its
/// lexicographically smallest one).
RasterImage thin(const RasterImage& mask);

/// Number of incident branches (4-connected neighbour runs) at (row, col).
int incident_branches(const RasterImage& skeleton, int row, int col);

/// Throws std::invalid_argument when the input contains a solid 2x2 block,
/// i.e. is not a thinned mask.
SkeletonGraph extract_graph(const RasterImage& skeleton);

/// Removes open edges shorter than min_length_px that hang off a branch
/// point, keeping the branch point itself. min_length_px <= 0 disables.
RasterImage prune_spurs(const RasterImage& skeleton, int min_length_px);

int count_components_8(const RasterImage& mask);

nlohmann::json graph_to_json(const SkeletonGraph& graph);
SkeletonGraph graph_from_json(const nlohmann::json& j);
void save_graph(const SkeletonGraph& graph, const std::string& path);
SkeletonGraph load_graph(const std::string& path);

}  // namespace crackscan
