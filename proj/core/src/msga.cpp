#include "slamot/msga.hpp"

#include <algorithm>
#include <cmath>

#include "slamot/parallel.hpp"

namespace slamot {

bool MsgaWeights::valid() const {
  return neighborhood >= 0.0 && spatial >= 0.0 && shape >= 0.0 &&
         std::abs(neighborhood + spatial + shape - 1.0) <= 1e-9;
}

MsgaWeights MsgaWeights::without(bool drop_neighborhood, bool drop_spatial, bool drop_shape) const {
  MsgaWeights w = *this;
  if (drop_neighborhood) w.neighborhood = 0.0;
  if (drop_spatial) w.spatial = 0.0;
  if (drop_shape) w.shape = 0.0;
  const double sum = w.neighborhood + w.spatial + w.shape;
  if (sum <= 0.0) return w;
  w.neighborhood /= sum;
  w.spatial /= sum;
  w.shape /= sum;
  return w;
}

double edge_consistency(const Pose& e_q, const Pose& e_t) {
  return std::exp(-frobenius_deviation(e_q * e_t.inverse()));
}

std::vector<EdgeMatch> greedy_edge_match(const StarGraph& q, const StarGraph& t) {
  std::vector<EdgeMatch> out;
  if (t.edges.empty()) return out;
  out.reserve(q.edges.size());
  for (std::size_t a = 0; a < q.edges.size(); ++a) {
    EdgeMatch best{static_cast<int>(a), -1, -1.0};
    for (std::size_t b = 0; b < t.edges.size(); ++b) {
      const double l = edge_consistency(q.edges[a].transform, t.edges[b].transform);
      if (l > best.consistency) {
        best.t_edge = static_cast<int>(b);
        best.consistency = l;
      }
    }
    out.push_back(best);
  }
  return out;
}

double neighborhood_score(const StarGraph& q, const StarGraph& t) {
  const bool q_empty = q.edges.empty(), t_empty = t.edges.empty();
  if (q_empty && t_empty) return 1.0;
  if (q_empty || t_empty) return 0.0;
  const auto matches = greedy_edge_match(q, t);
  double sum = 0.0;
  for (const auto& m : matches) sum += m.consistency;
  return sum / static_cast<double>(matches.size());
}

double shape_score(const PointSet& p, const PointSet& q, const IcpConfig& icp, const Pose& initial) {
  if (p.empty() || q.empty()) return 0.0;
  const IcpResult r = icp_with_yaw_hypotheses(p, q, initial, icp);
  return static_cast<double>(r.inliers) / static_cast<double>(std::max(p.size(), q.size()));
}

ConsistencyScore pair_score(const Node& q_center, const StarGraph& q, const Node& t_center, const StarGraph& t,
                            const MsgaParams& params) {
  ConsistencyScore s;
  s.weights = params.weights;
  s.neighborhood = neighborhood_score(q, t);
  s.spatial = ngiou(q_center.box, t_center.box, params.giou_mode);
  if (params.weights.shape > 0.0) {
    // Box-to-box relative pose brings the detection cloud onto the tracklet's.
    const Pose initial = t_center.pose * q_center.pose.inverse();
    s.shape = shape_score(q_center.points, t_center.points, params.icp, initial);
  }
  s.combined = params.weights.neighborhood * s.neighborhood + params.weights.spatial * s.spatial +
               params.weights.shape * s.shape;
  return s;
}

MatchResult km_assign(const ScoreMatrix& scores, double tau) {
  ScoreMatrix gated(scores.rows(), scores.cols());
  for (int r = 0; r < scores.rows(); ++r) {
    for (int c = 0; c < scores.cols(); ++c) {
      const auto& v = scores.at(r, c);
      if (v && *v >= tau) gated.set(r, c, *v);
    }
  }
  const Assignment a = solve_max_assignment(gated);

  MatchResult out;
  std::vector<char> col_used(scores.cols(), false);
  for (int r = 0; r < scores.rows(); ++r) {
    const int c = a.row_to_col[r];
    if (c < 0) {
      out.births.push_back(r);
      continue;
    }
    col_used[c] = true;
    MatchPair m;
    m.detection = r;
    m.tracklet = c;
    m.score.combined = *gated.at(r, c);
    out.pairs.push_back(m);
  }
  for (int c = 0; c < scores.cols(); ++c) {
    if (!col_used[c]) out.unmatched_tracks.push_back(c);
  }
  return out;
}

MatchResult associate(const FrameGraph& qg, const FrameGraph& tg, const MsgaParams& params) {
  const int rows = static_cast<int>(qg.nodes.size());
  const int cols = static_cast<int>(tg.nodes.size());

  struct Candidate {
    int r, c;
  };
  std::vector<Candidate> candidates;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double d = (qg.nodes[r].pose.translation() - tg.nodes[c].pose.translation()).norm();
      if (d <= params.candidate_radius) candidates.push_back({r, c});
    }
  }

  std::vector<ConsistencyScore> scored(candidates.size());
  parallel_for(candidates.size(), params.threads, [&](std::size_t k) {
    const auto [r, c] = candidates[k];
    scored[k] = pair_score(qg.nodes[r], qg.stars[r], tg.nodes[c], tg.stars[c], params);
  });

  ScoreMatrix matrix(rows, cols);
  std::vector<int> slot(static_cast<std::size_t>(rows) * cols, -1);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    matrix.set(candidates[k].r, candidates[k].c, scored[k].combined);
    slot[static_cast<std::size_t>(candidates[k].r) * cols + candidates[k].c] = static_cast<int>(k);
  }
  MatchResult local = km_assign(matrix, params.tau);

  // Translate row/column indices to node ids and attach the full scores.
  MatchResult out;
  for (auto& m : local.pairs) {
    const int k = slot[static_cast<std::size_t>(m.detection) * cols + m.tracklet];
    out.pairs.push_back({qg.nodes[m.detection].id, tg.nodes[m.tracklet].id, scored[k]});
  }
  for (int r : local.births) out.births.push_back(qg.nodes[r].id);
  for (int c : local.unmatched_tracks) out.unmatched_tracks.push_back(tg.nodes[c].id);
  return out;
}

}  // namespace slamot
