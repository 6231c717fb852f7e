#include <stdexcept>

#include "doctest.h"
#include "slamot/graph.hpp"

using namespace slamot;

namespace {

std::vector<Node> nodes_at(const std::vector<Vec3>& centers) {
  std::vector<Node> out;
  for (std::size_t i = 0; i < centers.size(); ++i)
    out.push_back(Node::from_box(static_cast<int>(i), Box3{centers[i], Vec3(4, 2, 1.5), 0.0}));
  return out;
}

}  // namespace

TEST_CASE("defaults") {
  GraphParams p;
  CHECK(p.k == 3);
  CHECK(p.radius == 5.0);
}

TEST_CASE("single node has no neighbors") {
  const FrameGraph g = build_frame_graph(nodes_at({{0, 0, 0}}), {});
  REQUIRE(g.stars.size() == 1);
  CHECK(g.stars[0].edges.empty());
}

TEST_CASE("empty node list") {
  CHECK(build_frame_graph({}, {}).stars.empty());
}

TEST_CASE("collinear nodes") {
  const FrameGraph g = build_frame_graph(nodes_at({{0, 0, 0}, {2, 0, 0}, {20, 0, 0}}), {3, 5.0});
  REQUIRE(g.stars.size() == 3);
  REQUIRE(g.stars[0].edges.size() == 1);
  CHECK(g.stars[0].edges[0].neighbor == 1);
  CHECK(g.stars[0].edges[0].distance == doctest::Approx(2.0));
  REQUIRE(g.stars[1].edges.size() == 1);
  CHECK(g.stars[1].edges[0].neighbor == 0);
  CHECK(g.stars[2].edges.empty());
  // edge transform is center-relative
  CHECK((g.stars[0].edges[0].transform.translation() - Vec3(2, 0, 0)).norm() < 1e-12);
}

TEST_CASE("k nearest within radius, ordered by distance") {
  const FrameGraph g =
      build_frame_graph(nodes_at({{0, 0, 0}, {4, 0, 0}, {1, 0, 0}, {0, 3, 0}, {0, -2, 0}, {0, 4.9, 0}}), {3, 5.0});
  const auto& e = g.stars[0].edges;
  REQUIRE(e.size() == 3);
  CHECK(e[0].neighbor == 2);
  CHECK(e[1].neighbor == 4);
  CHECK(e[2].neighbor == 3);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(build_frame_graph(nodes_at({{0, 0, 0}}), {0, 5.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_frame_graph(nodes_at({{0, 0, 0}}), {3, 0.0}), std::invalid_argument);
}
