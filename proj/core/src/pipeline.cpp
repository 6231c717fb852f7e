#include "slamot/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <set>

#include "slamot/graph.hpp"
#include "slamot/msga.hpp"
#include "slamot/ogo.hpp"

namespace slamot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

TrackHistoryEntry* history_at(Tracklet& t, int frame) {
  auto it = std::lower_bound(t.history.begin(), t.history.end(), frame,
                             [](const TrackHistoryEntry& e, int f) { return e.frame < f; });
  return it != t.history.end() && it->frame == frame ? &*it : nullptr;
}

struct PendingSolve {
  int frame = -1;
  std::vector<int> frames;
  std::shared_ptr<FactorGraph> snapshot;
  std::future<LmTrace> result;
  double launch_ms = 0.0;
};

class Engine {
 public:
  Engine(const Scenario& s, const RunConfig& cfg) : scenario_(s), cfg_(cfg), store_(scaled_tracker(cfg)) {
    window_.w = cfg.window_w;
  }

  RunRecord run() {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < scenario_.frames.size(); ++i) {
      try {
        step(static_cast<int>(i));
      } catch (const std::exception& e) {
        if (pending_) pending_->result.wait();
        throw PipelineError("frame " + std::to_string(i) + ": " + e.what());
      }
    }
    publish_oefw();
    finish();
    rec_.timings.total = ms_since(t0);
    return std::move(rec_);
  }

 private:
  static TrackerConfig scaled_tracker(const RunConfig& cfg) {
    TrackerConfig t = cfg.tracker;
    t.active_window *= cfg.keyframe_stride;
    return t;
  }

  Pose current_ego(int frame) const {
    const VarKey key = VarKey::ego(frame);
    if (graph_.has(key)) return graph_.at(key).pose;
    return nonkey_ego_.at(frame);
  }

  void step(int i) {
    const Frame& fr = scenario_.frames[static_cast<std::size_t>(i)];
    FrameRecord frec;
    frec.index = fr.index;

    auto t = Clock::now();
    Pose ego_init = fr.ego_odom;
    double dt = scenario_.config.dt;
    if (i > 0) {
      const Frame& prev = scenario_.frames[static_cast<std::size_t>(i - 1)];
      ego_init = current_ego(i - 1) * (prev.ego_odom.inverse() * fr.ego_odom);
      dt = fr.timestamp - prev.timestamp;
    }
    frec.ego_pre = ego_init;
    rec_.timings.ingest += ms_since(t);

    t = Clock::now();
    if (i > 0) store_.predict_all(dt);
    rec_.timings.predict += ms_since(t);

    if (i % cfg_.keyframe_stride != 0) {
      frec.keyframe = false;
      nonkey_ego_[i] = ego_init;
      for (auto& tr : store_.tracks()) {
        if (tr.status == TrackStatus::confirmed) tr.history.push_back({i, tr.box()});
      }
      rec_.frames.push_back(std::move(frec));
      return;
    }

    // Detections into the world frame through the initial ego estimate.
    t = Clock::now();
    std::vector<WorldDetection> dets;
    dets.reserve(fr.detections.size());
    std::vector<Node> q_nodes;
    for (std::size_t j = 0; j < fr.detections.size(); ++j) {
      const Detection& d = fr.detections[j];
      WorldDetection wd{static_cast<int>(j), transform_box(ego_init, d.box),
                        transform_points(ego_init, d.points, PointFrame::world)};
      q_nodes.push_back(Node::from_box(wd.id, wd.box, wd.points));
      dets.push_back(std::move(wd));
    }
    std::vector<Node> t_nodes;
    for (int id : store_.active_set(i)) {
      const Tracklet* tr = store_.find(id);
      t_nodes.push_back(Node::from_box(id, tr->box(), tr->world_points()));
    }
    rec_.timings.ingest += ms_since(t);

    t = Clock::now();
    const FrameGraph qg = build_frame_graph(std::move(q_nodes), cfg_.graph);
    const FrameGraph tg = build_frame_graph(std::move(t_nodes), cfg_.graph);
    const MatchResult match = associate(qg, tg, cfg_.msga);
    rec_.timings.association += ms_since(t);

    t = Clock::now();
    const std::vector<int> born = store_.step_lifecycle(match, dets, i);
    std::vector<std::pair<int, int>> observed;  // detection index, track id
    for (const auto& p : match.pairs) {
      observed.emplace_back(p.detection, p.tracklet);
      frec.matches.push_back({p.detection, p.tracklet, p.score.combined});
    }
    for (std::size_t b = 0; b < born.size() && b < match.births.size(); ++b) {
      observed.emplace_back(match.births[b], born[b]);
      frec.births.push_back({match.births[b], born[b], 0.0});
    }
    std::sort(observed.begin(), observed.end());
    rec_.timings.lifecycle += ms_since(t);

    t = Clock::now();
    add_factors(i, fr, ego_init, observed);
    rec_.timings.ocow += ms_since(t);

    t = Clock::now();
    publish_oefw();
    rec_.timings.oefw += ms_since(t);

    t = Clock::now();
    if (cfg_.use_ocow) {
      // The current frame joins the window record only at promotion time.
      std::vector<int> frames = window_.ocow_frames;
      frames.insert(std::lower_bound(frames.begin(), frames.end(), i), i);
      OcowResult res = solve_ocow(graph_, frames, cfg_.lm);
      rec_.solves.push_back({i, "ocow-1", std::move(res.stage1)});
      rec_.solves.push_back({i, "ocow-2", std::move(res.stage2)});
      correct_tracks(i, ego_init, observed);
    }
    rec_.timings.ocow += ms_since(t);

    t = Clock::now();
    std::vector<int> objects;
    for (const auto& [det, track] : observed) objects.push_back(track);
    migrate(i, objects);
    rec_.timings.promotion += ms_since(t);

    rec_.frames.push_back(std::move(frec));
  }

  void add_factors(int i, const Frame& fr, const Pose& ego_init, const std::vector<std::pair<int, int>>& observed) {
    Variable ego;
    ego.kind = VariableKind::ego_pose;
    ego.pose = ego_init;
    ego.fixed = i == 0;
    graph_.add_variable(VarKey::ego(i), ego);

    for (const auto& obs : fr.landmark_obs) {
      const VarKey lm = VarKey::landmark(obs.landmark_id);
      if (!graph_.has(lm)) {
        Variable v;
        v.kind = VariableKind::landmark;
        v.point = ego_init * obs.point;
        graph_.add_variable(lm, v);
      }
      Factor f;
      f.kind = FactorKind::map_point;
      f.frame = i;
      f.ego = VarKey::ego(i);
      f.other = lm;
      f.observed_point = obs.point;
      f.weight = cfg_.ogo_weights.map;
      graph_.add_factor(f);
    }

    for (const auto& [det, track] : observed) {
      const Pose det_pose = fr.detections[static_cast<std::size_t>(det)].box.pose();
      VarKey key = VarKey::object(track, i);
      if (promoted_.count(track) && graph_.has(VarKey::shared_object(track))) {
        key = VarKey::shared_object(track);
      } else {
        Variable v;
        v.kind = VariableKind::object_pose;
        v.pose = ego_init * det_pose;
        graph_.add_variable(key, v);
      }
      Factor f;
      f.kind = FactorKind::object_detection;
      f.frame = i;
      f.ego = VarKey::ego(i);
      f.other = key;
      f.observed_pose = det_pose;
      f.weight = cfg_.ogo_weights.object;
      f.robust = true;
      graph_.add_factor(f);
    }
  }

  // Moves the tracklets observed this frame by the stage-1 ego correction.
  void correct_tracks(int i, const Pose& ego_init, const std::vector<std::pair<int, int>>& observed) {
    const Pose delta = graph_.at(VarKey::ego(i)).pose * ego_init.inverse();
    for (const auto& [det, track] : observed) {
      Tracklet* tr = store_.find(track);
      if (!tr) continue;
      const Pose p = delta * tr->pose();
      tr->state.head<3>() = p.translation();
      tr->state(3) = wrap_angle(p.yaw());
      tr->state.segment<3>(7) = delta.rotation() * tr->state.segment<3>(7).eval();
      if (TrackHistoryEntry* h = history_at(*tr, i)) h->box = tr->box();
    }
  }

  bool is_static(int track) const {
    const Tracklet* tr = store_.find(track);
    return tr && tr->velocity().head<2>().norm() < cfg_.static_speed;
  }

  void migrate(int i, const std::vector<int>& objects) {
    PromotionPolicy policy;
    for (const auto& [obj, count] : window_.observation_counts) {
      const Tracklet* tr = store_.find(obj);
      const bool dead = !tr || tr->status == TrackStatus::dead;
      const bool still = is_static(obj);
      if (!still) policy.ineligible.insert(obj);
      if (dead || (count + (std::count(objects.begin(), objects.end(), obj) > 0 ? 1 : 0) > window_.w && !still)) {
        policy.released.insert(obj);
      }
    }
    window_ = promote(std::move(window_), i, objects, policy);

    auto push_on = [&](int f) {
      window_.ocow_frames.erase(std::find(window_.ocow_frames.begin(), window_.ocow_frames.end(), f));
      window_.oefw_frames.insert(std::lower_bound(window_.oefw_frames.begin(), window_.oefw_frames.end(), f), f);
      window_.newly_migrated_frames.push_back(f);
    };
    if (!cfg_.use_ocow) {
      const auto all = window_.ocow_frames;
      for (int f : all) push_on(f);
    }
    while (static_cast<int>(window_.ocow_frames.size()) > cfg_.ocow_capacity) push_on(window_.ocow_frames.front());

    for (int obj : window_.newly_migrated_objects) share_object(obj);

    if (!cfg_.use_oefw) {
      for (int f : window_.newly_migrated_frames) freeze(f);
    }
    while (static_cast<int>(window_.oefw_frames.size()) > cfg_.oefw_capacity) freeze(window_.oefw_frames.front());

    if (cfg_.use_oefw && !window_.oefw_frames.empty() &&
        (!window_.newly_migrated_frames.empty() || !window_.newly_migrated_objects.empty())) {
      launch_oefw(i);
    }
  }

  void freeze(int f) {
    const auto it = std::find(window_.oefw_frames.begin(), window_.oefw_frames.end(), f);
    if (it != window_.oefw_frames.end()) window_.oefw_frames.erase(it);
    if (graph_.has(VarKey::ego(f))) graph_.at(VarKey::ego(f)).fixed = true;
    frozen_.insert(f);
  }

  // Replaces the per-frame poses of a promoted static object by one shared pose.
  void share_object(int track) {
    promoted_.insert(track);
    std::vector<std::size_t> ids;
    std::vector<Pose> poses;
    std::set<VarKey> old_keys;
    auto& fs = graph_.factors();
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const Factor& f = fs[k];
      if (f.kind != FactorKind::object_detection || f.other.id != track || f.other.frame < 0) continue;
      if (frozen_.count(f.frame)) continue;
      ids.push_back(k);
      if (old_keys.insert(f.other).second) poses.push_back(graph_.at(f.other).pose);
    }
    if (ids.empty()) return;
    Variable shared;
    shared.kind = VariableKind::object_pose;
    shared.pose = chordal_mean(poses);
    const VarKey key = VarKey::shared_object(track);
    graph_.add_variable(key, shared);
    for (std::size_t k : ids) fs[k].other = key;
    for (const auto& k : old_keys) graph_.erase(k);
  }

  void launch_oefw(int i) {
    publish_oefw();
    const auto t = Clock::now();
    // A per-frame object pose has a single factor, so its optimum is ego * det
    // whatever the ego; those factors are settled in closed form on publish.
    std::vector<std::size_t> ids;
    for (std::size_t id : factors_in_frames(graph_, window_.oefw_frames)) {
      const Factor& f = graph_.factors()[id];
      if (f.kind == FactorKind::object_detection && f.other.frame >= 0) continue;
      ids.push_back(id);
    }
    std::vector<std::size_t> new_ids;
    auto snapshot = std::make_shared<FactorGraph>(graph_.extract(ids, new_ids));
    // Landmarks also seen from frozen frames keep their estimate.
    const std::vector<int> frozen(frozen_.begin(), frozen_.end());
    for (std::size_t id : factors_in_frames(graph_, frozen, FactorKind::map_point)) {
      const VarKey& lm = graph_.factors()[id].other;
      if (snapshot->has(lm)) snapshot->at(lm).fixed = true;
    }
    const std::vector<int> frames = window_.oefw_frames;
    const LmConfig lm = cfg_.lm;
    PendingSolve p;
    p.frame = i;
    p.frames = frames;
    p.snapshot = snapshot;
    p.result = std::async(cfg_.concurrent ? std::launch::async : std::launch::deferred,
                          [snapshot, frames, lm] { return solve_joint(*snapshot, frames, lm, true); });
    pending_ = std::move(p);
    rec_.timings.oefw += ms_since(t);
  }

  // Results become visible at a fixed point of the frame loop, whichever
  // thread computed them.
  void publish_oefw() {
    if (!pending_) return;
    LmTrace trace = pending_->result.get();
    if (!trace.aborted) {
      for (const auto& [key, v] : pending_->snapshot->variables()) {
        if (!graph_.has(key)) continue;
        Variable& dst = graph_.at(key);
        if (dst.fixed) continue;
        dst.pose = v.pose;
        dst.point = v.point;
      }
      for (std::size_t id : factors_in_frames(graph_, pending_->frames, FactorKind::object_detection)) {
        const Factor& f = graph_.factors()[id];
        if (f.other.frame < 0 || !graph_.has(f.other)) continue;
        graph_.at(f.other).pose = graph_.at(f.ego).pose * f.observed_pose;
      }
    }
    rec_.solves.push_back({pending_->frame, "oefw", std::move(trace)});
    pending_.reset();
  }

  void finish() {
    for (const auto& f : graph_.factors()) {
      if (f.kind != FactorKind::object_detection) continue;
      Tracklet* tr = store_.find(f.other.id);
      if (!tr) continue;
      if (TrackHistoryEntry* h = history_at(*tr, f.frame)) {
        h->box = box_from_pose(graph_.at(f.other).pose, h->box.dims);
      }
    }
    for (auto& fr : rec_.frames) fr.ego_post = current_ego(fr.index);
    for (const auto& tr : store_.tracks()) {
      TrackRecord r;
      r.id = tr.id;
      r.status = tr.status;
      r.ever_confirmed = tr.ever_confirmed;
      r.reported = tr.ever_confirmed || tr.status != TrackStatus::dead;
      r.birth_frame = tr.birth_frame;
      r.history = tr.history;
      rec_.tracks.push_back(std::move(r));
    }
  }

  const Scenario& scenario_;
  RunConfig cfg_;
  TrackStore store_;
  FactorGraph graph_;
  WindowState window_;
  std::set<int> frozen_;
  std::set<int> promoted_;
  std::map<int, Pose> nonkey_ego_;
  std::optional<PendingSolve> pending_;
  RunRecord rec_;
};

}  // namespace

TrackOutput RunRecord::output() const {
  TrackOutput out(frames.size());
  for (const auto& t : tracks) {
    if (!t.reported) continue;
    for (const auto& h : t.history) {
      if (h.frame >= 0 && static_cast<std::size_t>(h.frame) < out.size()) {
        out[static_cast<std::size_t>(h.frame)].push_back({t.id, h.box});
      }
    }
  }
  return out;
}

std::vector<Pose> RunRecord::ego_estimates() const {
  std::vector<Pose> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.ego_post);
  return out;
}

double RunRecord::final_oefw_cost() const {
  for (auto it = solves.rbegin(); it != solves.rend(); ++it) {
    if (it->stage == "oefw") return it->trace.final_cost();
  }
  return 0.0;
}

RunRecord run(const Scenario& scenario, const RunConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < scenario.frames.size(); ++i) {
    if (scenario.frames[i].index != static_cast<int>(i)) {
      throw PipelineError("frame " + std::to_string(i) + ": index " + std::to_string(scenario.frames[i].index) +
                          " out of sequence");
    }
  }
  Engine engine(scenario, cfg);
  return engine.run();
}

WindowProblem build_window_problem(const Scenario& scenario, const RunConfig& cfg, int first, int count) {
  if (first < 0 || count < 1 || static_cast<std::size_t>(first + count) > scenario.frames.size()) {
    throw PipelineError("window [" + std::to_string(first) + ", " + std::to_string(first + count) +
                        ") outside the scenario");
  }
  WindowProblem p;
  FactorGraph& g = p.graph;
  for (int i = first; i < first + count; ++i) {
    const Frame& fr = scenario.frames[static_cast<std::size_t>(i)];
    p.frames.push_back(i);
    Variable ego;
    ego.kind = VariableKind::ego_pose;
    ego.pose = fr.ego_odom;
    g.add_variable(VarKey::ego(i), ego);

    for (const auto& obs : fr.landmark_obs) {
      const VarKey lm = VarKey::landmark(obs.landmark_id);
      if (!g.has(lm)) {
        Variable v;
        v.kind = VariableKind::landmark;
        v.point = fr.ego_odom * obs.point;
        g.add_variable(lm, v);
      }
      Factor f;
      f.kind = FactorKind::map_point;
      f.frame = i;
      f.ego = VarKey::ego(i);
      f.other = lm;
      f.observed_point = obs.point;
      f.weight = cfg.ogo_weights.map;
      g.add_factor(f);
    }

    for (const auto& d : fr.detections) {
      if (d.clutter || !d.gt_agent_id) continue;
      const int agent = *d.gt_agent_id;
      const bool still = scenario.agent(agent).parked;
      const VarKey key = still ? VarKey::shared_object(agent) : VarKey::object(agent, i);
      if (!g.has(key)) {
        Variable v;
        v.kind = VariableKind::object_pose;
        v.pose = fr.ego_odom * d.box.pose();
        g.add_variable(key, v);
      }
      Factor f;
      f.kind = FactorKind::object_detection;
      f.frame = i;
      f.ego = VarKey::ego(i);
      f.other = key;
      f.observed_pose = d.box.pose();
      f.weight = cfg.ogo_weights.object;
      f.robust = true;
      g.add_factor(f);
    }
  }
  return p;
}

}  // namespace slamot
