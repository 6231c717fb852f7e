#pragma once

#include <string>
#include <string_view>

#include "slamot/factor_graph.hpp"
#include "slamot/graph.hpp"
#include "slamot/msga.hpp"
#include "slamot/ogo.hpp"
#include "slamot/simulator.hpp"
#include "slamot/tracking.hpp"

namespace slamot {

/// Everything `run` needs besides the scenario.
struct RunConfig {
  GraphParams graph;
  MsgaParams msga;
  TrackerConfig tracker;
  LmConfig lm;
  OgoWeights ogo_weights;

  int window_w = 4;         ///< promotion threshold
  int keyframe_stride = 1;  ///< every k-th frame is associated and optimized
  int ocow_capacity = 12;   ///< older OCOW frames are pushed on
  int oefw_capacity = 10;   ///< older OEFW frames are frozen
  double static_speed = 0.2;  ///< m/s; slower tracklets count as static

  bool use_ocow = true;
  bool use_oefw = true;
  bool concurrent = true;  ///< OEFW solves on a background thread

  /// Sets the neighbor radius and the association candidate radius together.
  void set_radius(double L);
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Applies one `--ablate` switch: spatial, neighborhood or shape zero that
/// criterion's weight; ocow or oefw disable that window.
void apply_ablation(RunConfig& cfg, std::string_view name);

/// Comma-separated list of ablation names; empty entries are ignored.
void apply_ablations(RunConfig& cfg, std::string_view list);

/// "f,f,f" -> (neighborhood, spatial, shape).
MsgaWeights parse_weights(std::string_view text);

/// Either a bare number (detection position sigma) or comma-separated
/// key=value pairs with keys pos, yaw, dim, ego_t, ego_r.
NoiseSpec parse_noise_spec(std::string_view text);

std::string describe(const RunConfig& cfg);

}  // namespace slamot
