#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "slamot/geometry.hpp"
#include "slamot/msga.hpp"

namespace slamot {

using TrackState = Eigen::Matrix<double, 11, 1>;  // x y z yaw l w h vx vy vz vyaw
using TrackCov = Eigen::Matrix<double, 11, 11>;

enum class TrackStatus { tentative, confirmed, dead };

const char* to_string(TrackStatus s);

struct TrackerConfig {
  int confirm_hits = 2;
  int max_age = 3;     ///< consecutive misses before a tracklet dies
  int active_window = 4;  ///< w: tracklets observed within the last w frames are active

  // Process noise standard deviations per second of prediction.
  double q_pos = 0.5;
  double q_yaw = 0.1;
  double q_dim = 0.02;
  double q_vel = 2.0;
  double q_yaw_rate = 0.3;

  // Measurement noise standard deviations.
  double r_pos = 0.3;
  double r_yaw = 0.1;
  double r_dim = 0.2;

  double birth_velocity_sigma = 10.0;
  double birth_yaw_rate_sigma = 1.0;
};

/// A detection already transformed into the world frame.
struct WorldDetection {
  int id = 0;
  Box3 box;
  PointSet points;
};

struct TrackHistoryEntry {
  int frame = 0;
  Box3 box;  ///< world frame; overwritten by refined estimates from the optimizer
};

struct Tracklet {
  int id = 0;
  TrackState state = TrackState::Zero();
  TrackCov covariance = TrackCov::Identity();
  int hits = 0;
  int misses = 0;
  TrackStatus status = TrackStatus::tentative;
  bool ever_confirmed = false;
  int birth_frame = 0;
  int last_observed = 0;
  std::vector<TrackHistoryEntry> history;
  std::vector<Vec3> local_points;  ///< latest surface points in the object frame

  Box3 box() const;
  Pose pose() const { return box().pose(); }
  Vec3 velocity() const { return state.segment<3>(7); }
  PointSet world_points() const;
};

/// Constant-velocity propagation of position and yaw; dims unchanged.
Tracklet predict(const Tracklet& t, double dt, const TrackerConfig& cfg);

/// Kalman correction with a (x y z yaw l w h) measurement. The yaw innovation
/// is wrapped to (-pi, pi]. Bumps hits, clears misses, confirms at confirm_hits.
Tracklet update(const Tracklet& t, const Box3& measurement, const TrackerConfig& cfg);

/// Tracklet created from an unmatched detection.
Tracklet make_birth(int id, const WorldDetection& det, int frame, const TrackerConfig& cfg);

/// Owns the tracklets of one run. Ids are monotone and never reused.
class TrackStore {
 public:
  explicit TrackStore(TrackerConfig cfg = {}) : cfg_(cfg) {}

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Tracklet>& tracks() const { return tracks_; }
  std::vector<Tracklet>& tracks() { return tracks_; }
  Tracklet* find(int id);
  const Tracklet* find(int id) const;

  /// Predicts every non-dead tracklet forward by dt.
  void predict_all(double dt);

  /// Ids of non-dead tracklets observed within the last `active_window` frames.
  std::vector<int> active_set(int frame) const;

  /// Applies one frame of association results. Matched tracklets are
  /// updated, unmatched ones age and die at max_age, and births become new
  /// tentative tracklets. Returns the ids assigned to births, in order.
  std::vector<int> step_lifecycle(const MatchResult& match, const std::vector<WorldDetection>& detections,
                                  int frame);

  int births() const { return next_id_; }

 private:
  TrackerConfig cfg_;
  std::vector<Tracklet> tracks_;
  int next_id_ = 0;
};

}  // namespace slamot
