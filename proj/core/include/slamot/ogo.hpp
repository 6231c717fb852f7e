#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slamot/factor_graph.hpp"
#include "slamot/geometry.hpp"

namespace slamot {

/// Frame and object bookkeeping for the two optimization windows.
///
/// New frames enter the object-centric window (OCOW). An object observed in
/// more than `w` frames is promoted to the object-ego fusion window (OEFW);
/// a frame follows once every object it observed has been promoted.
struct WindowState {
  int w = 4;
  std::vector<int> ocow_frames;  ///< ascending
  std::vector<int> oefw_frames;  ///< ascending
  std::map<int, std::vector<int>> frame_objects;  ///< objects observed per windowed frame
  std::map<int, int> observation_counts;
  std::set<int> migrated_objects;

  // Filled by the most recent promote() call.
  std::vector<int> newly_migrated_frames;
  std::vector<int> newly_migrated_objects;

  bool in_ocow(int frame) const;
  bool in_oefw(int frame) const;
};

struct PromotionPolicy {
  /// Objects that must not be promoted (not static).
  std::set<int> ineligible;
  /// Objects whose detections never hold a frame back (e.g. mature movers or
  /// dead tracklets); their factors travel with the frame.
  std::set<int> released;
};

/// Records `frame` (observing `objects`) in the OCOW when frame >= 0, then
/// migrates eligible objects whose observation count exceeds w, and every
/// OCOW frame whose objects are all migrated or released.
WindowState promote(WindowState window, int frame, const std::vector<int>& objects,
                    const PromotionPolicy& policy = {});

struct OgoWeights {
  double map = 1.0 / (0.05 * 0.05);  ///< information of landmark observations
  double object = 1.0 / (0.3 * 0.3); ///< information of detection poses
};

struct OcowResult {
  LmTrace stage1;
  LmTrace stage2;
};

/// Factor ids whose frame is in `frames`.
std::vector<std::size_t> factors_in_frames(const FactorGraph& g, const std::vector<int>& frames,
                                           std::optional<FactorKind> kind = std::nullopt);

/// Two-stage solve over the OCOW frames. Stage 1 refines ego poses and
/// landmarks with map factors only; landmarks also observed from frames
/// outside the OCOW stay fixed as anchors. Stage 2 freezes all ego poses and
/// landmarks and refines the per-frame object poses with object factors.
/// Shared (promoted) object poses are not touched.
OcowResult solve_ocow(FactorGraph& g, const WindowState& window, const LmConfig& cfg);
/// Same over an explicit frame set, e.g. the window plus a frame not yet recorded.
OcowResult solve_ocow(FactorGraph& g, const std::vector<int>& frames, const LmConfig& cfg);

/// Joint solve over the OEFW frames with both factor kinds. The first OEFW
/// ego pose is held fixed for the duration of the solve.
LmTrace solve_oefw(FactorGraph& g, const WindowState& window, const LmConfig& cfg);

/// Joint solve over arbitrary frames from the current values, without the
/// stage split (the ego-centric baseline).
LmTrace solve_joint(FactorGraph& g, const std::vector<int>& frames, const LmConfig& cfg,
                    bool fix_first_ego = true);

struct InitComparison {
  LmTrace ego_centric;     ///< joint solve from the raw initialization
  LmTrace object_stage1;   ///< object-centric: map-only stage
  LmTrace object_stage2;   ///< object-centric: object-only stage
  LmTrace object_fused;    ///< object-centric: joint solve from the staged result
  double ego_centric_final = 0.0;
  double object_centric_final = 0.0;
};

/// Runs both initialization strategies on copies of `g` over `frames`; all
/// reported costs are the joint objective.
InitComparison compare_initializations(const FactorGraph& g, const std::vector<int>& frames, const LmConfig& cfg);

/// Frobenius-closest rigid transform to the mean of homogeneous matrices.
Pose chordal_mean(const std::vector<Pose>& poses);

}  // namespace slamot
