#pragma once

#include <vector>

#include "slamot/geometry.hpp"

namespace slamot {

/// A detection or predicted tracklet placed in the world frame.
struct Node {
  int id = 0;
  Pose pose;       ///< world <- object; translation = box center, yaw = box yaw
  Box3 box;        ///< world frame
  PointSet points; ///< world frame

  static Node from_box(int id, const Box3& box, PointSet points = {});
};

struct StarEdge {
  int neighbor = 0;       ///< index of the neighbor node in the frame graph
  Pose transform;         ///< invert(center.pose) * neighbor.pose
  double distance = 0.0;  ///< center-to-center distance
};

/// One center node and up to K relative-transform edges to its nearest
/// neighbors within radius L.
struct StarGraph {
  int center = 0;  ///< index of the center node in the frame graph
  std::vector<StarEdge> edges;
};

struct GraphParams {
  int k = 3;
  double radius = 5.0;
};

struct FrameGraph {
  std::vector<Node> nodes;
  std::vector<StarGraph> stars;  ///< stars[i] is centered on nodes[i]
  GraphParams params;

  const Node& center_of(const StarGraph& s) const { return nodes[s.center]; }
  const Node& neighbor_of(const StarEdge& e) const { return nodes[e.neighbor]; }
};

/// Builds one star per node; neighbors are the K nearest nodes whose
/// center distance is <= L, ordered by distance and then by node id.
/// Throws std::invalid_argument for K < 1 or L <= 0.
FrameGraph build_frame_graph(std::vector<Node> nodes, GraphParams params);

}  // namespace slamot
