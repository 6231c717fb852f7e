#include "slamot/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace slamot {

Node Node::from_box(int id, const Box3& box, PointSet points) {
  Node n;
  n.id = id;
  n.box = box;
  n.pose = box.pose();
  n.points = std::move(points);
  return n;
}

FrameGraph build_frame_graph(std::vector<Node> nodes, GraphParams params) {
  if (params.k < 1) throw std::invalid_argument("graph K must be >= 1");
  if (!(params.radius > 0.0)) throw std::invalid_argument("graph radius L must be > 0");

  FrameGraph g;
  g.nodes = std::move(nodes);
  g.params = params;
  g.stars.resize(g.nodes.size());

  const std::size_t n = g.nodes.size();
  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const Node& c = g.nodes[i];
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = (g.nodes[j].pose.translation() - c.pose.translation()).norm();
      if (d <= params.radius) candidates.emplace_back(d, j);
    }
    std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return g.nodes[a.second].id < g.nodes[b.second].id;
    });
    if (candidates.size() > static_cast<std::size_t>(params.k)) candidates.resize(params.k);

    StarGraph& star = g.stars[i];
    star.center = static_cast<int>(i);
    const Pose center_inv = c.pose.inverse();
    for (const auto& [d, j] : candidates) {
      star.edges.push_back({static_cast<int>(j), center_inv * g.nodes[j].pose, d});
    }
  }
  return g;
}

}  // namespace slamot
