#include "slamot/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "json_codec.hpp"

namespace slamot {

using nlohmann::json;

namespace {

json config_to_json(const SimConfig& c) {
  return json{{"num_agents", c.num_agents},
              {"parked_fraction", c.parked_fraction},
              {"num_frames", c.num_frames},
              {"dt", c.dt},
              {"lanes", c.lanes},
              {"lane_width", c.lane_width},
              {"ego_speed", c.ego_speed},
              {"lane_speed_spread", c.lane_speed_spread},
              {"agent_speed_jitter", c.agent_speed_jitter},
              {"gap_min", c.gap_min},
              {"gap_max", c.gap_max},
              {"yaw_rate", c.yaw_rate},
              {"segment_duration", c.segment_duration},
              {"sensor_range", c.sensor_range},
              {"fov_deg", c.fov_deg},
              {"sigma_pos", c.sigma_pos},
              {"sigma_yaw", c.sigma_yaw},
              {"sigma_dim", c.sigma_dim},
              {"p_miss", c.p_miss},
              {"p_fp", c.p_fp},
              {"sigma_pt", c.sigma_pt},
              {"points_per_detection", c.points_per_detection},
              {"sigma_odom_t", c.sigma_odom_t},
              {"sigma_odom_r", c.sigma_odom_r},
              {"num_landmarks", c.num_landmarks},
              {"landmark_range", c.landmark_range},
              {"sigma_landmark", c.sigma_landmark}};
}

SimConfig config_from_json(const json& j) {
  SimConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("num_agents", c.num_agents);
  get("parked_fraction", c.parked_fraction);
  get("num_frames", c.num_frames);
  get("dt", c.dt);
  get("lanes", c.lanes);
  get("lane_width", c.lane_width);
  get("ego_speed", c.ego_speed);
  get("lane_speed_spread", c.lane_speed_spread);
  get("agent_speed_jitter", c.agent_speed_jitter);
  get("gap_min", c.gap_min);
  get("gap_max", c.gap_max);
  get("yaw_rate", c.yaw_rate);
  get("segment_duration", c.segment_duration);
  get("sensor_range", c.sensor_range);
  get("fov_deg", c.fov_deg);
  get("sigma_pos", c.sigma_pos);
  get("sigma_yaw", c.sigma_yaw);
  get("sigma_dim", c.sigma_dim);
  get("p_miss", c.p_miss);
  get("p_fp", c.p_fp);
  get("sigma_pt", c.sigma_pt);
  get("points_per_detection", c.points_per_detection);
  get("sigma_odom_t", c.sigma_odom_t);
  get("sigma_odom_r", c.sigma_odom_r);
  get("num_landmarks", c.num_landmarks);
  get("landmark_range", c.landmark_range);
  get("sigma_landmark", c.sigma_landmark);
  return c;
}

json noise_to_json(const NoiseSpec& n) {
  return json{{"sigma_pos", n.sigma_pos},
              {"sigma_yaw", n.sigma_yaw},
              {"sigma_dim", n.sigma_dim},
              {"sigma_ego_t", n.sigma_ego_t},
              {"sigma_ego_r", n.sigma_ego_r}};
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec n;
  n.sigma_pos = j.value("sigma_pos", 0.0);
  n.sigma_yaw = j.value("sigma_yaw", 0.0);
  n.sigma_dim = j.value("sigma_dim", 0.0);
  n.sigma_ego_t = j.value("sigma_ego_t", 0.0);
  n.sigma_ego_r = j.value("sigma_ego_r", 0.0);
  return n;
}

json detection_to_json(const Detection& d) {
  json pts = json::array();
  for (const auto& p : d.points.points) pts.push_back(codec::vec_to_json(p));
  json j{{"center", codec::vec_to_json(d.box.center)},
         {"dims", codec::vec_to_json(d.box.dims)},
         {"yaw", d.box.yaw},
         {"points", std::move(pts)},
         {"clutter", d.clutter}};
  j["gt_agent_id"] = d.gt_agent_id ? json(*d.gt_agent_id) : json(nullptr);
  return j;
}

Detection detection_from_json(const json& j) {
  Detection d;
  d.box.center = codec::vec_from_json(j.at("center"));
  d.box.dims = codec::vec_from_json(j.at("dims"));
  d.box.yaw = j.at("yaw").get<double>();
  d.points.frame = PointFrame::sensor;
  for (const auto& p : j.at("points")) d.points.points.push_back(codec::vec_from_json(p));
  d.clutter = j.value("clutter", false);
  if (j.contains("gt_agent_id") && !j.at("gt_agent_id").is_null()) d.gt_agent_id = j.at("gt_agent_id").get<int>();
  return d;
}

}  // namespace

void write_scenario(std::ostream& os, const Scenario& s) {
  json header{{"type", "header"}, {"format", "slamot-scenario/1"}, {"seed", s.seed}, {"config", config_to_json(s.config)}};
  if (s.injected_noise) {
    header["injected_noise"] = noise_to_json(*s.injected_noise);
    header["injected_seed"] = s.injected_seed.value_or(0);
  }
  json lms = json::array();
  for (const auto& l : s.landmarks) lms.push_back(codec::vec_to_json(l));
  header["landmarks"] = std::move(lms);
  json agents = json::array();
  for (const auto& a : s.agents) {
    agents.push_back(json{{"id", a.id}, {"dims", codec::vec_to_json(a.dims)}, {"parked", a.parked}});
  }
  header["agents"] = std::move(agents);
  os << header.dump() << '\n';

  for (const auto& fr : s.frames) {
    json dets = json::array();
    for (const auto& d : fr.detections) dets.push_back(detection_to_json(d));
    json obs = json::array();
    for (const auto& o : fr.landmark_obs) {
      obs.push_back(json{{"id", o.landmark_id}, {"point", codec::vec_to_json(o.point)}});
    }
    json agents_gt = json::array();
    for (const auto& a : fr.agents) {
      agents_gt.push_back(json{{"id", a.id}, {"pose", codec::pose_to_json(a.pose)}, {"visible", a.visible}});
    }
    json line{{"type", "frame"},
              {"index", fr.index},
              {"timestamp", fr.timestamp},
              {"ego_gt", codec::pose_to_json(fr.ego_gt)},
              {"ego_odom", codec::pose_to_json(fr.ego_odom)},
              {"detections", std::move(dets)},
              {"landmark_obs", std::move(obs)},
              {"agents_gt", std::move(agents_gt)}};
    os << line.dump() << '\n';
  }
}

Scenario read_scenario(std::istream& is) {
  Scenario s;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("scenario line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      const std::string type = j.value("type", "");
      if (type == "header") {
        s.seed = j.at("seed").get<std::uint64_t>();
        s.config = config_from_json(j.at("config"));
        if (j.contains("injected_noise")) {
          s.injected_noise = noise_from_json(j.at("injected_noise"));
          s.injected_seed = j.value("injected_seed", std::uint64_t{0});
        }
        for (const auto& l : j.at("landmarks")) s.landmarks.push_back(codec::vec_from_json(l));
        for (const auto& a : j.at("agents")) {
          s.agents.push_back({a.at("id").get<int>(), codec::vec_from_json(a.at("dims")), a.value("parked", false)});
        }
        have_header = true;
      } else if (type == "frame") {
        if (!have_header) throw FormatError("frame before header");
        Frame fr;
        fr.index = j.at("index").get<int>();
        fr.timestamp = j.at("timestamp").get<double>();
        fr.ego_gt = codec::pose_from_json(j.at("ego_gt"));
        fr.ego_odom = codec::pose_from_json(j.at("ego_odom"));
        for (const auto& d : j.at("detections")) fr.detections.push_back(detection_from_json(d));
        for (const auto& o : j.at("landmark_obs")) {
          fr.landmark_obs.push_back({o.at("id").get<int>(), codec::vec_from_json(o.at("point"))});
        }
        for (const auto& a : j.at("agents_gt")) {
          fr.agents.push_back({a.at("id").get<int>(), codec::pose_from_json(a.at("pose")), a.value("visible", false)});
        }
        s.frames.push_back(std::move(fr));
      } else {
        throw FormatError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw FormatError("scenario line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw FormatError("scenario has no header line");
  return s;
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_scenario(os, s);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_scenario(is);
}

std::string scenario_to_string(const Scenario& s) {
  std::ostringstream os;
  write_scenario(os, s);
  return os.str();
}

}  // namespace slamot
