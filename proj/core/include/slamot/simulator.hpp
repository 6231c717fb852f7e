#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slamot/geometry.hpp"

namespace slamot {

/// Raised for invalid configuration values; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generation parameters for the synthetic congested-road world.
///
/// The world is a straight multi-lane road along +x. The ego vehicle drives
/// in one lane; moving agents fill the lanes around it with bumper gaps in
/// [gap_min, gap_max]; parked agents line both shoulders.
struct SimConfig {
  int num_agents = 20;
  double parked_fraction = 0.3;
  int num_frames = 100;
  double dt = 0.1;

  int lanes = 4;
  double lane_width = 3.5;
  double ego_speed = 8.0;
  double lane_speed_spread = 1.0;  ///< stddev of per-lane speed around ego_speed
  double agent_speed_jitter = 0.4; ///< half-width of per-segment speed changes
  double gap_min = 3.0;
  double gap_max = 8.0;
  double yaw_rate = 0.03;          ///< weaving yaw rate magnitude (rad/s)
  double segment_duration = 3.0;   ///< duration of constant yaw-rate pieces (s)

  double sensor_range = 40.0;
  double fov_deg = 360.0;

  double sigma_pos = 0.0;
  double sigma_yaw = 0.0;
  double sigma_dim = 0.0;
  double p_miss = 0.0;
  double p_fp = 0.0;  ///< expected clutter detections per frame (Poisson mean)
  double sigma_pt = 0.0;
  int points_per_detection = 40;

  double sigma_odom_t = 0.0;
  double sigma_odom_r = 0.0;

  int num_landmarks = 240;
  double landmark_range = 30.0;
  double sigma_landmark = 0.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Extra Gaussian perturbation applied to an existing scenario.
struct NoiseSpec {
  double sigma_pos = 0.0;
  double sigma_yaw = 0.0;
  double sigma_dim = 0.0;
  double sigma_ego_t = 0.0;
  double sigma_ego_r = 0.0;

  bool touches_detections() const { return sigma_pos > 0 || sigma_yaw > 0 || sigma_dim > 0; }
  bool touches_ego() const { return sigma_ego_t > 0 || sigma_ego_r > 0; }
};

struct Detection {
  Box3 box;          ///< sensor frame
  PointSet points;   ///< sensor frame
  /// Ground-truth agent; withheld from the tracker, used only by metrics.
  std::optional<int> gt_agent_id;
  bool clutter = false;
};

struct LandmarkObservation {
  int landmark_id = 0;
  Vec3 point = Vec3::Zero();  ///< sensor frame
};

struct AgentState {
  int id = 0;
  Pose pose;        ///< world <- agent
  bool visible = false;
};

struct Frame {
  int index = 0;
  double timestamp = 0.0;
  Pose ego_gt;    ///< world <- ego
  Pose ego_odom;  ///< noisy odometry estimate of ego_gt
  std::vector<Detection> detections;
  std::vector<LandmarkObservation> landmark_obs;
  std::vector<AgentState> agents;  ///< ground truth, one entry per agent
};

struct AgentInfo {
  int id = 0;
  Vec3 dims = Vec3::Ones();
  bool parked = false;
};

struct Scenario {
  SimConfig config;
  std::uint64_t seed = 0;
  std::optional<NoiseSpec> injected_noise;
  std::optional<std::uint64_t> injected_seed;
  std::vector<Vec3> landmarks;
  std::vector<AgentInfo> agents;
  std::vector<Frame> frames;

  /// Ground-truth world box of an agent at a frame.
  Box3 gt_box(const Frame& f, const AgentState& a) const;
  const AgentInfo& agent(int id) const;
};

Scenario generate(const SimConfig& config, std::uint64_t seed);

/// Adds zero-mean Gaussian noise to detection boxes and/or ego odometry.
/// Ground truth is untouched; the first frame's odometry stays anchored.
Scenario inject_noise(const Scenario& s, const NoiseSpec& noise, std::uint64_t seed);

struct ValidationIssue {
  int frame = -1;
  std::string message;
};

/// Checks the scenario invariants; an empty result means valid.
std::vector<ValidationIssue> validate_scenario(const Scenario& s);

}  // namespace slamot
