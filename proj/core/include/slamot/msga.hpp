#pragma once

#include <vector>

#include "slamot/assignment.hpp"
#include "slamot/geometry.hpp"
#include "slamot/graph.hpp"
#include "slamot/icp.hpp"

namespace slamot {

/// Convex weights of the three consistency criteria.
struct MsgaWeights {
  double neighborhood = 0.3;
  double spatial = 0.4;
  double shape = 0.3;

  bool valid() const;
  /// Zeroes the named criteria and rescales the rest to sum to one.
  MsgaWeights without(bool drop_neighborhood, bool drop_spatial, bool drop_shape) const;
};

struct MsgaParams {
  MsgaWeights weights;
  double tau = 0.5;               ///< gate on the combined score
  double candidate_radius = 5.0;  ///< L; tracklets farther than this are never scored
  IcpConfig icp;
  GiouMode giou_mode = GiouMode::enclosing;
  int threads = 1;  ///< workers for per-pair scoring
};

struct ConsistencyScore {
  double neighborhood = 0.0;
  double spatial = 0.0;
  double shape = 0.0;
  double combined = 0.0;
  MsgaWeights weights;
};

struct EdgeMatch {
  int q_edge = 0;
  int t_edge = 0;
  double consistency = 0.0;
};

struct MatchPair {
  int detection = 0;  ///< node id in the query graph
  int tracklet = 0;   ///< node id in the tracklet graph
  ConsistencyScore score;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<int> births;            ///< unmatched detection ids
  std::vector<int> unmatched_tracks;  ///< unmatched tracklet ids
};

/// exp(-|| e_q * inv(e_t) - I ||_F)
double edge_consistency(const Pose& e_q, const Pose& e_t);

/// For every query edge picks the tracklet edge of highest consistency; a
/// tracklet edge may be picked more than once. Ties go to the lower index.
std::vector<EdgeMatch> greedy_edge_match(const StarGraph& q, const StarGraph& t);

/// Mean consistency over the greedy edge matches. Both stars without
/// neighbors score 1; exactly one without neighbors scores 0.
double neighborhood_score(const StarGraph& q, const StarGraph& t);

/// ICP fitness n_c / max(|p|, |q|) after aligning p onto q from `initial`;
/// 0 when either cloud is empty.
double shape_score(const PointSet& p, const PointSet& q, const IcpConfig& icp, const Pose& initial = Pose::identity());

ConsistencyScore pair_score(const Node& q_center, const StarGraph& q, const Node& t_center, const StarGraph& t,
                            const MsgaParams& params);

/// Gated maximum-score one-to-one matching. Rows are detections, columns
/// tracklets; entries below tau (or forbidden) are never matched. Every
/// unmatched row is reported as a birth. Ids are row/column indices.
MatchResult km_assign(const ScoreMatrix& scores, double tau);

/// Full association between a query graph and a tracklet graph: candidate
/// collection within the radius, per-pair scoring, gating and matching.
MatchResult associate(const FrameGraph& qg, const FrameGraph& tg, const MsgaParams& params);

}  // namespace slamot
