#include "slamot/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace slamot {

namespace {

using Rng = std::mt19937_64;

// Independent streams keep the world layout fixed when only noise settings change.
Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return Rng(seq);
}

double normal(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> d(0.0, sigma);
  return d(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

Vec3 sample_dims(Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  Vec3 base;
  if (u < 0.7) {
    base = Vec3(4.5, 1.85, 1.5);
  } else if (u < 0.9) {
    base = Vec3(5.3, 2.05, 2.1);
  } else {
    base = Vec3(8.5, 2.5, 3.2);
  }
  for (int k = 0; k < 3; ++k) base[k] *= uniform(rng, 0.92, 1.08);
  return base;
}

// Triangle-wave heading: constant yaw-rate pieces alternating in sign, so
// the heading oscillates around the lane direction without drifting.
struct Weave {
  double rate = 0.0;
  double period = 1.0;  // one full oscillation = two constant-rate pieces
  double phase = 0.0;

  double yaw(double t) const {
    if (rate == 0.0) return 0.0;
    const double half = 0.5 * period;
    double u = std::fmod(t + phase, period);
    if (u < 0.0) u += period;
    // rises over the first half, falls over the second, centred on zero
    const double amp = 0.5 * rate * half;
    return u < half ? -amp + rate * u : amp - rate * (u - half);
  }
};

struct MotionPlan {
  int id = -1;  // -1 for ego
  int lane = 0;
  double length = 4.5;
  double base_speed = 0.0;
  std::vector<double> speed_offsets;  // one per speed segment
  double segment = 3.0;
  Weave weave;
  Vec3 position = Vec3::Zero();
  double z = 0.0;
};

std::vector<Vec3> sample_visible_surface(const Box3& box_sensor, int count, Rng& rng) {
  std::vector<Vec3> out;
  if (count <= 0) return out;
  const Pose box_pose = box_sensor.pose();
  const Vec3 sensor_local = box_pose.inverse() * Vec3::Zero();
  const double l = box_sensor.dims.x(), w = box_sensor.dims.y(), h = box_sensor.dims.z();
  const double sx = sensor_local.x() >= 0.0 ? 1.0 : -1.0;
  const double sy = sensor_local.y() >= 0.0 ? 1.0 : -1.0;
  const double a_x = w * h, a_y = l * h, a_top = l * w;
  const double total = a_x + a_y + a_top;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double pick = uniform(rng, 0.0, total);
    Vec3 p;
    if (pick < a_x) {
      p = Vec3(sx * 0.5 * l, uniform(rng, -0.5, 0.5) * w, uniform(rng, -0.5, 0.5) * h);
    } else if (pick < a_x + a_y) {
      p = Vec3(uniform(rng, -0.5, 0.5) * l, sy * 0.5 * w, uniform(rng, -0.5, 0.5) * h);
    } else {
      p = Vec3(uniform(rng, -0.5, 0.5) * l, uniform(rng, -0.5, 0.5) * w, 0.5 * h);
    }
    out.push_back(box_pose * p);
  }
  return out;
}

// Fixed surface sample of one vehicle in its own frame: the four sides and
// the roof, area weighted. Faces: 0 +x, 1 -x, 2 +y, 3 -y, 4 top.
struct SurfaceModel {
  std::vector<Vec3> points;
  std::vector<int> faces;
};

SurfaceModel sample_surface_model(const Vec3& dims, int count, Rng& rng) {
  SurfaceModel m;
  const double l = dims.x(), w = dims.y(), h = dims.z();
  const double a_x = w * h, a_y = l * h, a_top = l * w;
  const double total = 2.0 * a_x + 2.0 * a_y + a_top;
  for (int i = 0; i < count; ++i) {
    const double pick = uniform(rng, 0.0, total);
    const double u = uniform(rng, -0.5, 0.5), v = uniform(rng, -0.5, 0.5);
    if (pick < 2.0 * a_x) {
      const int face = pick < a_x ? 0 : 1;
      m.points.emplace_back((face == 0 ? 0.5 : -0.5) * l, u * w, v * h);
      m.faces.push_back(face);
    } else if (pick < 2.0 * a_x + 2.0 * a_y) {
      const int face = pick < 2.0 * a_x + a_y ? 2 : 3;
      m.points.emplace_back(u * l, (face == 2 ? 0.5 : -0.5) * w, v * h);
      m.faces.push_back(face);
    } else {
      m.points.emplace_back(u * l, v * w, 0.5 * h);
      m.faces.push_back(4);
    }
  }
  return m;
}

// Model points on the faces turned towards the sensor.
std::vector<Vec3> visible_model_points(const SurfaceModel& m, const Box3& box_sensor) {
  const Pose box_pose = box_sensor.pose();
  const Vec3 sensor_local = box_pose.inverse() * Vec3::Zero();
  const int fx = sensor_local.x() >= 0.0 ? 0 : 1;
  const int fy = sensor_local.y() >= 0.0 ? 2 : 3;
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    const int f = m.faces[i];
    if (f == fx || f == fy || f == 4) out.push_back(box_pose * m.points[i]);
  }
  return out;
}

bool in_view(const SimConfig& cfg, const Vec3& p_sensor) {
  const double r = p_sensor.head<2>().norm();
  if (r > cfg.sensor_range) return false;
  if (cfg.fov_deg >= 360.0) return true;
  const double bearing = std::atan2(p_sensor.y(), p_sensor.x());
  return std::abs(bearing) <= 0.5 * cfg.fov_deg * std::numbers::pi / 180.0;
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("invalid config field '" + field + "': " + why);
  };
  if (num_agents < 0) fail("num_agents", "must be >= 0");
  if (parked_fraction < 0.0 || parked_fraction > 1.0) fail("parked_fraction", "must be in [0, 1]");
  if (num_frames < 1) fail("num_frames", "must be >= 1");
  if (!(dt > 0.0)) fail("dt", "must be > 0");
  if (lanes < 1) fail("lanes", "must be >= 1");
  if (!(lane_width > 0.0)) fail("lane_width", "must be > 0");
  if (ego_speed < 0.0) fail("ego_speed", "must be >= 0");
  if (lane_speed_spread < 0.0) fail("lane_speed_spread", "must be >= 0");
  if (agent_speed_jitter < 0.0) fail("agent_speed_jitter", "must be >= 0");
  if (gap_min < 0.0) fail("gap_min", "must be >= 0");
  if (gap_max < gap_min) fail("gap_max", "must be >= gap_min");
  if (yaw_rate < 0.0) fail("yaw_rate", "must be >= 0");
  if (!(segment_duration > 0.0)) fail("segment_duration", "must be > 0");
  if (!(sensor_range > 0.0)) fail("sensor_range", "must be > 0");
  if (!(fov_deg > 0.0) || fov_deg > 360.0) fail("fov_deg", "must be in (0, 360]");
  if (sigma_pos < 0.0) fail("sigma_pos", "must be >= 0");
  if (sigma_yaw < 0.0) fail("sigma_yaw", "must be >= 0");
  if (sigma_dim < 0.0) fail("sigma_dim", "must be >= 0");
  if (p_miss < 0.0 || p_miss > 1.0) fail("p_miss", "must be in [0, 1]");
  if (p_fp < 0.0) fail("p_fp", "must be >= 0");
  if (sigma_pt < 0.0) fail("sigma_pt", "must be >= 0");
  if (points_per_detection < 0) fail("points_per_detection", "must be >= 0");
  if (sigma_odom_t < 0.0) fail("sigma_odom_t", "must be >= 0");
  if (sigma_odom_r < 0.0) fail("sigma_odom_r", "must be >= 0");
  if (num_landmarks < 0) fail("num_landmarks", "must be >= 0");
  if (!(landmark_range > 0.0)) fail("landmark_range", "must be > 0");
  if (sigma_landmark < 0.0) fail("sigma_landmark", "must be >= 0");
}

Box3 Scenario::gt_box(const Frame&, const AgentState& a) const {
  return box_from_pose(a.pose, agent(a.id).dims);
}

const AgentInfo& Scenario::agent(int id) const {
  // ids are dense and ordered by construction
  if (id >= 0 && id < static_cast<int>(agents.size()) && agents[id].id == id) return agents[id];
  for (const auto& a : agents) {
    if (a.id == id) return a;
  }
  throw std::out_of_range("unknown agent id " + std::to_string(id));
}

Scenario generate(const SimConfig& config, std::uint64_t seed) {
  config.validate();

  Scenario s;
  s.config = config;
  s.seed = seed;

  Rng layout = make_stream(seed, 1);
  Rng det_rng = make_stream(seed, 2);
  Rng odom_rng = make_stream(seed, 3);
  Rng lm_rng = make_stream(seed, 4);
  Rng shape_rng = make_stream(seed, 5);

  const double duration = config.dt * (config.num_frames - 1);
  const double road_half = 0.5 * config.lanes * config.lane_width;
  auto lane_y = [&](int lane) { return -road_half + (lane + 0.5) * config.lane_width; };
  const int ego_lane = (config.lanes - 1) / 2;

  const int num_parked = static_cast<int>(std::lround(config.num_agents * config.parked_fraction));
  const int num_moving = config.num_agents - num_parked;

  // Lane speeds, then chains of vehicles with random bumper gaps.
  std::vector<double> lane_speed(config.lanes);
  for (auto& v : lane_speed) v = std::max(0.5, config.ego_speed + normal(layout, config.lane_speed_spread));
  lane_speed[ego_lane] = config.ego_speed;

  std::vector<MotionPlan> plans;  // ego first
  const int n_segments = static_cast<int>(std::ceil(duration / config.segment_duration)) + 2;
  auto make_plan = [&](int id, int lane, double length, double speed, double weave_rate) {
    MotionPlan p;
    p.id = id;
    p.lane = lane;
    p.length = length;
    p.base_speed = speed;
    p.segment = config.segment_duration * uniform(layout, 0.8, 1.2);
    p.speed_offsets.resize(n_segments);
    for (auto& o : p.speed_offsets) {
      o = id < 0 ? 0.0 : uniform(layout, -config.agent_speed_jitter, config.agent_speed_jitter);
    }
    p.weave.rate = weave_rate * (id < 0 ? 0.5 : uniform(layout, 0.5, 1.0));
    p.weave.period = 2.0 * p.segment;
    p.weave.phase = uniform(layout, 0.0, p.weave.period);
    return p;
  };

  s.agents.reserve(config.num_agents);
  std::vector<int> per_lane(config.lanes, num_moving / config.lanes);
  for (int k = 0; k < num_moving % config.lanes; ++k) per_lane[(ego_lane + 1 + k) % config.lanes] += 1;

  plans.push_back(make_plan(-1, ego_lane, 4.5, config.ego_speed, config.yaw_rate));
  int next_id = 0;
  for (int lane = 0; lane < config.lanes; ++lane) {
    const int n = per_lane[lane];
    const bool has_ego = lane == ego_lane;
    std::vector<int> members;  // indices into plans, rear to front
    std::vector<double> lengths;
    const int total = n + (has_ego ? 1 : 0);
    const int ego_slot = has_ego ? total / 2 : -1;
    for (int slot = 0; slot < total; ++slot) {
      if (slot == ego_slot) {
        members.push_back(0);
        lengths.push_back(plans[0].length);
        continue;
      }
      AgentInfo info;
      info.id = next_id++;
      info.dims = sample_dims(layout);
      s.agents.push_back(info);
      plans.push_back(make_plan(info.id, lane, info.dims.x(), lane_speed[lane], config.yaw_rate));
      members.push_back(static_cast<int>(plans.size()) - 1);
      lengths.push_back(info.dims.x());
    }
    std::vector<double> xs(members.size(), 0.0);
    for (std::size_t k = 1; k < members.size(); ++k) {
      xs[k] = xs[k - 1] + 0.5 * (lengths[k - 1] + lengths[k]) + uniform(layout, config.gap_min, config.gap_max);
    }
    double shift = 0.0;
    if (has_ego) {
      shift = -xs[ego_slot];
    } else if (!xs.empty()) {
      shift = -0.5 * xs.back() + uniform(layout, -4.0, 4.0);
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      plans[members[k]].position = Vec3(xs[k] + shift, lane_y(lane), 0.0);
    }
  }

  // Parked rows along both shoulders, covering the stretch the ego drives through.
  struct Parked {
    int id;
    Pose pose;
  };
  std::vector<Parked> parked;
  const double shoulder = road_half + 1.6;
  for (int side = 0, remaining = num_parked; side < 2; ++side) {
    const int n = side == 0 ? (num_parked + 1) / 2 : remaining;
    remaining -= n;
    double x = uniform(layout, -15.0, 0.0);
    double prev_half = 0.0;
    for (int k = 0; k < n; ++k) {
      AgentInfo info;
      info.id = next_id++;
      info.dims = sample_dims(layout);
      info.parked = true;
      s.agents.push_back(info);
      if (k > 0) x += prev_half + 0.5 * info.dims.x() + uniform(layout, config.gap_min, config.gap_max);
      prev_half = 0.5 * info.dims.x();
      const double yaw = uniform(layout, 0.0, 1.0) < 0.5 ? 0.0 : std::numbers::pi;
      const double y = (side == 0 ? 1.0 : -1.0) * shoulder;
      parked.push_back({info.id, Pose::from_yaw(yaw, Vec3(x, y, 0.5 * info.dims.z()))});
    }
  }
  for (auto& p : plans) {
    p.z = p.id < 0 ? 0.0 : 0.5 * s.agents[p.id].dims.z();
  }

  // Landmarks: static points spread over the driven stretch of road and its margins.
  const double x_lo = -config.landmark_range - 10.0;
  const double x_hi = config.ego_speed * duration + config.landmark_range + 10.0;
  s.landmarks.reserve(config.num_landmarks);
  for (int k = 0; k < config.num_landmarks; ++k) {
    const double side = uniform(layout, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const double y = side * uniform(layout, road_half + 4.0, road_half + 20.0);
    s.landmarks.emplace_back(uniform(layout, x_lo, x_hi), y, uniform(layout, 0.2, 8.0));
  }

  // Integrate the moving vehicles frame by frame with a car-following guard.
  const int substeps = 10;
  std::vector<std::vector<Pose>> traj(plans.size(), std::vector<Pose>(config.num_frames));
  std::vector<int> order(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) order[i] = static_cast<int>(i);
  for (int f = 0; f < config.num_frames; ++f) {
    const double t = f * config.dt;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      traj[i][f] = Pose::from_yaw(plans[i].weave.yaw(t), Vec3(plans[i].position.x(), plans[i].position.y(), plans[i].z));
    }
    if (f + 1 == config.num_frames) break;
    // front-most first within each lane
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (plans[a].lane != plans[b].lane) return plans[a].lane < plans[b].lane;
      return plans[a].position.x() > plans[b].position.x();
    });
    std::vector<double> speed(plans.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto& p = plans[order[k]];
      const int seg = std::min(static_cast<int>(t / p.segment), static_cast<int>(p.speed_offsets.size()) - 1);
      double v = std::max(0.0, p.base_speed + p.speed_offsets[seg]);
      if (p.id < 0) v = p.base_speed;
      if (k > 0 && plans[order[k - 1]].lane == p.lane) {
        const auto& lead = plans[order[k - 1]];
        const double gap = lead.position.x() - p.position.x() - 0.5 * (lead.length + p.length);
        if (gap < config.gap_min) v = std::min(v, speed[order[k - 1]]);
        if (p.id < 0 && gap < config.gap_min) v = std::min(v, config.ego_speed);
      }
      speed[order[k]] = v;
    }
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const double h = config.dt / substeps;
      for (int sub = 0; sub < substeps; ++sub) {
        const double yaw = plans[i].weave.yaw(t + (sub + 0.5) * h);
        plans[i].position.x() += speed[i] * std::cos(yaw) * h;
        plans[i].position.y() += speed[i] * std::sin(yaw) * h;
      }
    }
  }

  // Roughly half of each model faces the sensor at any time.
  std::vector<SurfaceModel> surfaces;
  surfaces.reserve(s.agents.size());
  for (const auto& info : s.agents) {
    surfaces.push_back(sample_surface_model(info.dims, 2 * config.points_per_detection, shape_rng));
  }

  // Frames: ground truth, odometry, detections, clutter, landmark observations.
  s.frames.resize(config.num_frames);
  std::vector<Pose> agent_pose_by_id(s.agents.size());
  for (int f = 0; f < config.num_frames; ++f) {
    Frame& fr = s.frames[f];
    fr.index = f;
    fr.timestamp = f * config.dt;
    fr.ego_gt = traj[0][f];
    if (f == 0) {
      fr.ego_odom = fr.ego_gt;
    } else {
      const Pose rel = s.frames[f - 1].ego_gt.inverse() * fr.ego_gt;
      const Pose noise = Pose::from_yaw(normal(odom_rng, config.sigma_odom_r),
                                        Vec3(normal(odom_rng, config.sigma_odom_t),
                                             normal(odom_rng, config.sigma_odom_t),
                                             normal(odom_rng, config.sigma_odom_t)));
      fr.ego_odom = s.frames[f - 1].ego_odom * (rel * noise);
    }

    for (std::size_t i = 1; i < plans.size(); ++i) agent_pose_by_id[plans[i].id] = traj[i][f];
    for (const auto& p : parked) agent_pose_by_id[p.id] = p.pose;

    const Pose sensor_from_world = fr.ego_gt.inverse();
    fr.agents.reserve(s.agents.size());
    std::vector<Detection> dets;
    for (const auto& info : s.agents) {
      AgentState st;
      st.id = info.id;
      st.pose = agent_pose_by_id[info.id];
      st.visible = in_view(config, sensor_from_world * st.pose.translation());
      fr.agents.push_back(st);
      if (!st.visible) continue;
      if (config.p_miss > 0.0 && uniform(det_rng, 0.0, 1.0) < config.p_miss) continue;

      const Box3 truth = transform_box(sensor_from_world, box_from_pose(st.pose, info.dims));
      Detection d;
      d.gt_agent_id = info.id;
      d.box = truth;
      d.box.center += Vec3(normal(det_rng, config.sigma_pos), normal(det_rng, config.sigma_pos),
                           normal(det_rng, config.sigma_pos));
      d.box.yaw = wrap_angle(d.box.yaw + normal(det_rng, config.sigma_yaw));
      for (int k = 0; k < 3; ++k) {
        d.box.dims[k] = std::max(0.2, d.box.dims[k] + normal(det_rng, config.sigma_dim));
      }
      d.points.frame = PointFrame::sensor;
      d.points.points = visible_model_points(surfaces[static_cast<std::size_t>(info.id)], truth);
      for (auto& p : d.points.points) {
        p += Vec3(normal(det_rng, config.sigma_pt), normal(det_rng, config.sigma_pt),
                  normal(det_rng, config.sigma_pt));
      }
      dets.push_back(std::move(d));
    }

    if (config.p_fp > 0.0) {
      std::poisson_distribution<int> count(config.p_fp);
      const int n = count(det_rng);
      const double half_fov = std::min(180.0, 0.5 * config.fov_deg) * std::numbers::pi / 180.0;
      for (int k = 0; k < n; ++k) {
        const double r = uniform(det_rng, 5.0, config.sensor_range);
        const double bearing = uniform(det_rng, -half_fov, half_fov);
        const Vec3 dims = sample_dims(det_rng);
        Detection d;
        d.clutter = true;
        d.box = Box3{Vec3(r * std::cos(bearing), r * std::sin(bearing), 0.5 * dims.z()), dims,
                     uniform(det_rng, -std::numbers::pi, std::numbers::pi)};
        d.box.yaw = wrap_angle(d.box.yaw);
        d.points.frame = PointFrame::sensor;
        d.points.points = sample_visible_surface(d.box, config.points_per_detection, det_rng);
        for (auto& p : d.points.points) {
          p += Vec3(normal(det_rng, config.sigma_pt), normal(det_rng, config.sigma_pt),
                    normal(det_rng, config.sigma_pt));
        }
        dets.push_back(std::move(d));
      }
    }
    // the detector reports in no particular order
    std::shuffle(dets.begin(), dets.end(), det_rng);
    fr.detections = std::move(dets);

    for (std::size_t k = 0; k < s.landmarks.size(); ++k) {
      const Vec3 local = sensor_from_world * s.landmarks[k];
      if (local.norm() > config.landmark_range) continue;
      LandmarkObservation obs;
      obs.landmark_id = static_cast<int>(k);
      obs.point = local + Vec3(normal(lm_rng, config.sigma_landmark), normal(lm_rng, config.sigma_landmark),
                               normal(lm_rng, config.sigma_landmark));
      fr.landmark_obs.push_back(obs);
    }
  }
  return s;
}

Scenario inject_noise(const Scenario& s, const NoiseSpec& noise, std::uint64_t seed) {
  Scenario out = s;
  out.injected_noise = noise;
  out.injected_seed = seed;
  Rng det_rng = make_stream(seed, 11);
  Rng ego_rng = make_stream(seed, 12);
  for (auto& fr : out.frames) {
    if (noise.touches_detections()) {
      for (auto& d : fr.detections) {
        d.box.center += Vec3(normal(det_rng, noise.sigma_pos), normal(det_rng, noise.sigma_pos),
                             normal(det_rng, noise.sigma_pos));
        d.box.yaw = wrap_angle(d.box.yaw + normal(det_rng, noise.sigma_yaw));
        for (int k = 0; k < 3; ++k) d.box.dims[k] = std::max(0.2, d.box.dims[k] + normal(det_rng, noise.sigma_dim));
      }
    }
    if (noise.touches_ego() && fr.index > 0) {
      const Pose n = Pose::from_yaw(normal(ego_rng, noise.sigma_ego_r),
                                    Vec3(normal(ego_rng, noise.sigma_ego_t), normal(ego_rng, noise.sigma_ego_t),
                                         normal(ego_rng, noise.sigma_ego_t)));
      fr.ego_odom = fr.ego_odom * n;
    }
  }
  return out;
}

std::vector<ValidationIssue> validate_scenario(const Scenario& s) {
  std::vector<ValidationIssue> issues;
  auto report = [&](int frame, std::string msg) { issues.push_back({frame, std::move(msg)}); };

  try {
    s.config.validate();
  } catch (const ConfigError& e) {
    report(-1, e.what());
  }

  std::set<int> ids;
  for (const auto& a : s.agents) {
    if (!ids.insert(a.id).second) report(-1, "duplicate agent id " + std::to_string(a.id));
    if ((a.dims.array() <= 0.0).any()) report(-1, "agent " + std::to_string(a.id) + " has non-positive dims");
  }

  // Point spread tolerance: 1.5x the box extent plus the configured noise budget.
  double noise_margin = 3.0 * (s.config.sigma_pos + s.config.sigma_pt) + 3.0 * s.config.sigma_dim;
  if (s.injected_noise) noise_margin += 3.0 * (s.injected_noise->sigma_pos + s.injected_noise->sigma_dim);

  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    const Frame& fr = s.frames[f];
    const int fi = static_cast<int>(f);
    if (fr.index != fi) report(fi, "frame index " + std::to_string(fr.index) + " out of sequence");
    if (f > 0) {
      const double step = fr.timestamp - s.frames[f - 1].timestamp;
      if (!(step > 0.0)) report(fi, "timestamps not strictly increasing");
      if (std::abs(step - s.config.dt) > 1e-9) report(fi, "timestamp step differs from dt");
    }
    std::set<int> frame_ids;
    for (const auto& a : fr.agents) {
      if (!ids.count(a.id)) report(fi, "unknown agent id " + std::to_string(a.id));
      if (!frame_ids.insert(a.id).second) report(fi, "agent id repeated in frame");
    }
    for (std::size_t k = 0; k < fr.detections.size(); ++k) {
      const auto& d = fr.detections[k];
      if ((d.box.dims.array() <= 0.0).any()) {
        report(fi, "detection " + std::to_string(k) + " has non-positive dims");
        continue;
      }
      if (d.gt_agent_id && !ids.count(*d.gt_agent_id)) report(fi, "detection references unknown agent");
      const Pose to_local = d.box.pose().inverse();
      const Vec3 limit = 0.75 * d.box.dims + Vec3::Constant(noise_margin);
      for (const auto& p : d.points.points) {
        const Vec3 local = (to_local * p).cwiseAbs();
        if ((local.array() > limit.array()).any()) {
          report(fi, "detection " + std::to_string(k) + " has points outside 1.5x box extent");
          break;
        }
      }
    }
    for (const auto& obs : fr.landmark_obs) {
      if (obs.landmark_id < 0 || obs.landmark_id >= static_cast<int>(s.landmarks.size())) {
        report(fi, "landmark observation references unknown landmark " + std::to_string(obs.landmark_id));
      }
    }
  }
  return issues;
}

}  // namespace slamot
