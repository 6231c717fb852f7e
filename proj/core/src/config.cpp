#include "slamot/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace slamot {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string(field) + ": " + why);
}

}  // namespace

void RunConfig::set_radius(double L) {
  graph.radius = L;
  msga.candidate_radius = L;
}

void RunConfig::validate() const {
  require(graph.k >= 1, "k", "must be >= 1");
  require(graph.radius > 0, "L", "must be > 0");
  require(msga.candidate_radius > 0, "L", "must be > 0");
  require(msga.tau >= 0 && msga.tau <= 1, "tau", "must lie in [0, 1]");
  require(msga.weights.valid(), "lambda", "weights must be >= 0 and sum to 1");
  require(msga.threads >= 1, "threads", "must be >= 1");
  require(msga.icp.max_iterations >= 1, "icp-iterations", "must be >= 1");
  require(msga.icp.max_correspondence_distance > 0, "icp-distance", "must be > 0");
  require(window_w >= 1, "window-w", "must be >= 1");
  require(keyframe_stride >= 1, "keyframe-stride", "must be >= 1");
  require(ocow_capacity >= 1, "ocow-capacity", "must be >= 1");
  require(oefw_capacity >= 2, "oefw-capacity", "must be >= 2");
  require(static_speed >= 0, "static-speed", "must be >= 0");
  require(tracker.confirm_hits >= 1, "confirm-hits", "must be >= 1");
  require(tracker.max_age >= 1, "max-age", "must be >= 1");
  require(tracker.active_window >= 1, "active-window", "must be >= 1");
  require(lm.max_iterations >= 1, "lm-iterations", "must be >= 1");
  require(lm.huber_delta > 0, "huber-delta", "must be > 0");
  require(ogo_weights.map > 0 && ogo_weights.object > 0, "factor weights", "must be > 0");
}

void apply_ablation(RunConfig& cfg, std::string_view name) {
  name = trim(name);
  if (name == "spatial") {
    cfg.msga.weights = cfg.msga.weights.without(false, true, false);
  } else if (name == "neighborhood") {
    cfg.msga.weights = cfg.msga.weights.without(true, false, false);
  } else if (name == "shape") {
    cfg.msga.weights = cfg.msga.weights.without(false, false, true);
  } else if (name == "ocow") {
    cfg.use_ocow = false;
  } else if (name == "oefw") {
    cfg.use_oefw = false;
  } else {
    throw ConfigError("ablate: unknown switch '" + std::string(name) +
                      "' (expected spatial, neighborhood, shape, ocow or oefw)");
  }
}

void apply_ablations(RunConfig& cfg, std::string_view list) {
  for (auto part : split(list, ',')) {
    if (!part.empty()) apply_ablation(cfg, part);
  }
}

MsgaWeights parse_weights(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("lambda: expected three comma-separated weights");
  MsgaWeights w;
  w.neighborhood = parse_double(parts[0], "lambda");
  w.spatial = parse_double(parts[1], "lambda");
  w.shape = parse_double(parts[2], "lambda");
  if (!w.valid()) throw ConfigError("lambda: weights must be >= 0 and sum to 1");
  return w;
}

NoiseSpec parse_noise_spec(std::string_view text) {
  NoiseSpec n;
  text = trim(text);
  if (text.empty()) return n;
  if (text.find('=') == std::string_view::npos) {
    n.sigma_pos = parse_double(text, "noise-sigma");
  } else {
    for (auto part : split(text, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw ConfigError("noise-sigma: expected key=value, got '" + std::string(part) + "'");
      const auto key = trim(part.substr(0, eq));
      const double v = parse_double(trim(part.substr(eq + 1)), "noise-sigma");
      if (key == "pos") {
        n.sigma_pos = v;
      } else if (key == "yaw") {
        n.sigma_yaw = v;
      } else if (key == "dim") {
        n.sigma_dim = v;
      } else if (key == "ego_t") {
        n.sigma_ego_t = v;
      } else if (key == "ego_r") {
        n.sigma_ego_r = v;
      } else {
        throw ConfigError("noise-sigma: unknown key '" + std::string(key) + "'");
      }
    }
  }
  if (n.sigma_pos < 0 || n.sigma_yaw < 0 || n.sigma_dim < 0 || n.sigma_ego_t < 0 || n.sigma_ego_r < 0) {
    throw ConfigError("noise-sigma: sigmas must be >= 0");
  }
  return n;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  os << "k=" << cfg.graph.k << " L=" << cfg.graph.radius << " tau=" << cfg.msga.tau << " lambda="
     << cfg.msga.weights.neighborhood << ',' << cfg.msga.weights.spatial << ',' << cfg.msga.weights.shape
     << " w=" << cfg.window_w << " stride=" << cfg.keyframe_stride << " ocow=" << (cfg.use_ocow ? "on" : "off")
     << " oefw=" << (cfg.use_oefw ? "on" : "off");
  return os.str();
}

}  // namespace slamot
