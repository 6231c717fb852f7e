#include "slamot/tracking.hpp"

#include <algorithm>
#include <unordered_map>

#include <Eigen/Dense>

namespace slamot {

namespace {

using MeasMat = Eigen::Matrix<double, 7, 11>;
using Meas = Eigen::Matrix<double, 7, 1>;
using MeasCov = Eigen::Matrix<double, 7, 7>;

MeasMat measurement_matrix() {
  MeasMat H = MeasMat::Zero();
  for (int i = 0; i < 7; ++i) H(i, i) = 1.0;
  return H;
}

MeasCov measurement_noise(const TrackerConfig& cfg) {
  Meas d;
  d << cfg.r_pos, cfg.r_pos, cfg.r_pos, cfg.r_yaw, cfg.r_dim, cfg.r_dim, cfg.r_dim;
  return d.array().square().matrix().asDiagonal();
}

void clamp_state(TrackState& x) {
  x(3) = wrap_angle(x(3));
  for (int i = 4; i < 7; ++i) x(i) = std::max(0.1, x(i));
}

void symmetrize(TrackCov& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::tentative: return "tentative";
    case TrackStatus::confirmed: return "confirmed";
    case TrackStatus::dead: return "dead";
  }
  return "?";
}

Box3 Tracklet::box() const {
  return {state.head<3>(), state.segment<3>(4), wrap_angle(state(3))};
}

PointSet Tracklet::world_points() const {
  PointSet out;
  out.frame = PointFrame::world;
  const Pose p = pose();
  out.points.reserve(local_points.size());
  for (const auto& q : local_points) out.points.push_back(p * q);
  return out;
}

Tracklet predict(const Tracklet& t, double dt, const TrackerConfig& cfg) {
  Tracklet out = t;
  TrackCov F = TrackCov::Identity();
  F(0, 7) = dt;
  F(1, 8) = dt;
  F(2, 9) = dt;
  F(3, 10) = dt;
  out.state = F * t.state;
  clamp_state(out.state);

  TrackState q;
  q << cfg.q_pos, cfg.q_pos, cfg.q_pos, cfg.q_yaw, cfg.q_dim, cfg.q_dim, cfg.q_dim, cfg.q_vel, cfg.q_vel,
      cfg.q_vel, cfg.q_yaw_rate;
  const TrackCov Q = (q.array().square() * dt).matrix().asDiagonal();
  out.covariance = F * t.covariance * F.transpose() + Q;
  symmetrize(out.covariance);
  return out;
}

Tracklet update(const Tracklet& t, const Box3& measurement, const TrackerConfig& cfg) {
  Tracklet out = t;
  const MeasMat H = measurement_matrix();
  const MeasCov R = measurement_noise(cfg);

  Meas z;
  z << measurement.center, measurement.yaw, measurement.dims;
  Meas innovation = z - H * t.state;
  innovation(3) = wrap_angle(innovation(3));

  const MeasCov S = H * t.covariance * H.transpose() + R;
  // Pseudo-inverse tolerates the degenerate zero-noise configuration.
  const MeasCov S_inv = S.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::Matrix<double, 11, 7> K = t.covariance * H.transpose() * S_inv;

  out.state = t.state + K * innovation;
  clamp_state(out.state);
  const TrackCov I_KH = TrackCov::Identity() - K * H;
  out.covariance = I_KH * t.covariance * I_KH.transpose() + K * R * K.transpose();
  symmetrize(out.covariance);

  out.hits = t.hits + 1;
  out.misses = 0;
  if (out.status == TrackStatus::tentative && out.hits >= cfg.confirm_hits) {
    out.status = TrackStatus::confirmed;
    out.ever_confirmed = true;
  }
  return out;
}

Tracklet make_birth(int id, const WorldDetection& det, int frame, const TrackerConfig& cfg) {
  Tracklet t;
  t.id = id;
  t.state.setZero();
  t.state.head<3>() = det.box.center;
  t.state(3) = wrap_angle(det.box.yaw);
  t.state.segment<3>(4) = det.box.dims;
  TrackState sd;
  sd << cfg.r_pos, cfg.r_pos, cfg.r_pos, cfg.r_yaw, cfg.r_dim, cfg.r_dim, cfg.r_dim, cfg.birth_velocity_sigma,
      cfg.birth_velocity_sigma, cfg.birth_velocity_sigma, cfg.birth_yaw_rate_sigma;
  t.covariance = sd.array().square().matrix().asDiagonal();
  t.hits = 1;
  t.misses = 0;
  t.status = cfg.confirm_hits <= 1 ? TrackStatus::confirmed : TrackStatus::tentative;
  t.ever_confirmed = t.status == TrackStatus::confirmed;
  t.birth_frame = frame;
  t.last_observed = frame;
  const Pose to_local = det.box.pose().inverse();
  for (const auto& p : det.points.points) t.local_points.push_back(to_local * p);
  t.history.push_back({frame, det.box});
  return t;
}

Tracklet* TrackStore::find(int id) {
  auto it = std::lower_bound(tracks_.begin(), tracks_.end(), id, [](const Tracklet& t, int v) { return t.id < v; });
  return it != tracks_.end() && it->id == id ? &*it : nullptr;
}

const Tracklet* TrackStore::find(int id) const { return const_cast<TrackStore*>(this)->find(id); }

void TrackStore::predict_all(double dt) {
  for (auto& t : tracks_) {
    if (t.status != TrackStatus::dead) t = predict(t, dt, cfg_);
  }
}

std::vector<int> TrackStore::active_set(int frame) const {
  std::vector<int> out;
  for (const auto& t : tracks_) {
    if (t.status != TrackStatus::dead && t.last_observed >= frame - cfg_.active_window) out.push_back(t.id);
  }
  return out;
}

std::vector<int> TrackStore::step_lifecycle(const MatchResult& match, const std::vector<WorldDetection>& detections,
                                            int frame) {
  std::unordered_map<int, const WorldDetection*> by_id;
  for (const auto& d : detections) by_id[d.id] = &d;

  std::vector<char> matched(tracks_.size(), false);
  for (const auto& m : match.pairs) {
    Tracklet* t = find(m.tracklet);
    const auto it = by_id.find(m.detection);
    if (!t || it == by_id.end()) continue;
    *t = update(*t, it->second->box, cfg_);
    t->last_observed = frame;
    t->local_points.clear();
    const Pose to_local = it->second->box.pose().inverse();
    for (const auto& p : it->second->points.points) t->local_points.push_back(to_local * p);
    t->history.push_back({frame, t->box()});
    matched[t - tracks_.data()] = true;
  }
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Tracklet& t = tracks_[i];
    if (matched[i] || t.status == TrackStatus::dead) continue;
    t.misses += 1;
    if (t.misses >= cfg_.max_age) t.status = TrackStatus::dead;
  }

  std::vector<int> born;
  for (int det_id : match.births) {
    const auto it = by_id.find(det_id);
    if (it == by_id.end()) continue;
    const int id = next_id_++;
    tracks_.push_back(make_birth(id, *it->second, frame, cfg_));
    born.push_back(id);
  }
  return born;
}

}  // namespace slamot
