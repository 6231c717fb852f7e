#include "slamot/ogo.hpp"

#include <algorithm>

namespace slamot {

namespace {

bool contains_sorted(const std::vector<int>& v, int x) { return std::binary_search(v.begin(), v.end(), x); }

void insert_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

bool WindowState::in_ocow(int frame) const { return contains_sorted(ocow_frames, frame); }
bool WindowState::in_oefw(int frame) const { return contains_sorted(oefw_frames, frame); }

WindowState promote(WindowState window, int frame, const std::vector<int>& objects, const PromotionPolicy& policy) {
  window.newly_migrated_frames.clear();
  window.newly_migrated_objects.clear();

  if (frame >= 0 && !window.in_ocow(frame) && !window.in_oefw(frame)) {
    insert_sorted(window.ocow_frames, frame);
    std::vector<int> unique = objects;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (int obj : unique) window.observation_counts[obj] += 1;
    window.frame_objects[frame] = std::move(unique);
  }

  for (const auto& [obj, count] : window.observation_counts) {
    if (count > window.w && !window.migrated_objects.count(obj) && !policy.ineligible.count(obj)) {
      window.migrated_objects.insert(obj);
      window.newly_migrated_objects.push_back(obj);
    }
  }

  std::vector<int> staying;
  for (int f : window.ocow_frames) {
    const auto it = window.frame_objects.find(f);
    bool ready = true;
    if (it != window.frame_objects.end()) {
      for (int obj : it->second) {
        if (!window.migrated_objects.count(obj) && !policy.released.count(obj)) {
          ready = false;
          break;
        }
      }
    }
    if (ready) {
      insert_sorted(window.oefw_frames, f);
      window.newly_migrated_frames.push_back(f);
    } else {
      staying.push_back(f);
    }
  }
  window.ocow_frames = std::move(staying);
  return window;
}

std::vector<std::size_t> factors_in_frames(const FactorGraph& g, const std::vector<int>& frames,
                                           std::optional<FactorKind> kind) {
  std::vector<std::size_t> out;
  const auto& fs = g.factors();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (kind && fs[i].kind != *kind) continue;
    if (contains_sorted(frames, fs[i].frame)) out.push_back(i);
  }
  return out;
}

namespace {

std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

OcowResult two_stage(FactorGraph& g, const std::vector<int>& frames_in, const LmConfig& cfg,
                     const std::vector<std::size_t>* monitor) {
  const std::vector<int> frames = sorted_copy(frames_in);
  OcowResult out;

  // Landmarks seen from any frame outside the window anchor the stage-1 problem.
  std::set<VarKey> anchored;
  for (const auto& f : g.factors()) {
    if (f.kind == FactorKind::map_point && !contains_sorted(frames, f.frame)) anchored.insert(f.other);
  }

  const auto map_ids = factors_in_frames(g, frames, FactorKind::map_point);
  std::set<VarKey> stage1_free;
  for (int fr : frames) {
    if (g.has(VarKey::ego(fr))) stage1_free.insert(VarKey::ego(fr));
  }
  for (std::size_t id : map_ids) {
    const VarKey& lm = g.factors()[id].other;
    if (!anchored.count(lm)) stage1_free.insert(lm);
  }
  out.stage1 = g.optimize(map_ids, stage1_free, cfg, monitor);

  const auto object_ids = factors_in_frames(g, frames, FactorKind::object_detection);
  std::set<VarKey> stage2_free;
  for (std::size_t id : object_ids) {
    const VarKey& obj = g.factors()[id].other;
    if (obj.frame >= 0) stage2_free.insert(obj);
  }
  out.stage2 = g.optimize(object_ids, stage2_free, cfg, monitor);
  return out;
}

LmTrace joint(FactorGraph& g, const std::vector<int>& frames_in, const LmConfig& cfg, bool fix_first_ego,
              const std::vector<std::size_t>* monitor) {
  const std::vector<int> frames = sorted_copy(frames_in);
  const auto ids = factors_in_frames(g, frames);
  std::set<VarKey> free;
  for (std::size_t id : ids) {
    free.insert(g.factors()[id].ego);
    free.insert(g.factors()[id].other);
  }
  if (fix_first_ego && !frames.empty()) free.erase(VarKey::ego(frames.front()));
  return g.optimize(ids, free, cfg, monitor);
}

}  // namespace

OcowResult solve_ocow(FactorGraph& g, const WindowState& window, const LmConfig& cfg) {
  if (window.ocow_frames.empty()) return {};
  return two_stage(g, window.ocow_frames, cfg, nullptr);
}

OcowResult solve_ocow(FactorGraph& g, const std::vector<int>& frames, const LmConfig& cfg) {
  if (frames.empty()) return {};
  return two_stage(g, frames, cfg, nullptr);
}

LmTrace solve_oefw(FactorGraph& g, const WindowState& window, const LmConfig& cfg) {
  if (window.oefw_frames.empty()) return {};
  return joint(g, window.oefw_frames, cfg, true, nullptr);
}

LmTrace solve_joint(FactorGraph& g, const std::vector<int>& frames, const LmConfig& cfg, bool fix_first_ego) {
  return joint(g, frames, cfg, fix_first_ego, nullptr);
}

InitComparison compare_initializations(const FactorGraph& g, const std::vector<int>& frames_in, const LmConfig& cfg) {
  const std::vector<int> frames = sorted_copy(frames_in);
  const auto all_ids = factors_in_frames(g, frames);
  InitComparison out;

  FactorGraph ego_centric = g;
  out.ego_centric = joint(ego_centric, frames, cfg, true, &all_ids);
  out.ego_centric_final = ego_centric.total_cost(all_ids, cfg);

  FactorGraph object_centric = g;
  // The first frame anchors the gauge in both strategies.
  bool restore_fixed = false;
  if (!frames.empty() && object_centric.has(VarKey::ego(frames.front()))) {
    Variable& first = object_centric.at(VarKey::ego(frames.front()));
    restore_fixed = !first.fixed;
    first.fixed = true;
  }
  const OcowResult staged = two_stage(object_centric, frames, cfg, &all_ids);
  out.object_stage1 = staged.stage1;
  out.object_stage2 = staged.stage2;
  if (restore_fixed) object_centric.at(VarKey::ego(frames.front())).fixed = false;
  out.object_fused = joint(object_centric, frames, cfg, true, &all_ids);
  out.object_centric_final = object_centric.total_cost(all_ids, cfg);
  return out;
}

Pose chordal_mean(const std::vector<Pose>& poses) {
  if (poses.empty()) return Pose::identity();
  Mat3 r_sum = Mat3::Zero();
  Vec3 t_sum = Vec3::Zero();
  for (const auto& p : poses) {
    r_sum += p.rotation();
    t_sum += p.translation();
  }
  return {project_to_so3(r_sum), t_sum / static_cast<double>(poses.size())};
}

}  // namespace slamot
