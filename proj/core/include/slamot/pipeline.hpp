#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "slamot/config.hpp"
#include "slamot/factor_graph.hpp"
#include "slamot/metrics.hpp"
#include "slamot/simulator.hpp"

namespace slamot {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatchRecord {
  int detection = 0;  ///< index into the frame's detections
  int track = 0;
  double score = 0.0;  ///< combined score; 0 for births
};

struct FrameRecord {
  int index = 0;
  bool keyframe = true;
  Pose ego_pre;   ///< odometry-propagated initialization
  Pose ego_post;  ///< estimate at the end of the run
  std::vector<MatchRecord> matches;
  std::vector<MatchRecord> births;
};

struct TrackRecord {
  int id = 0;
  TrackStatus status = TrackStatus::tentative;
  bool ever_confirmed = false;
  bool reported = false;  ///< part of the tracker output
  int birth_frame = 0;
  std::vector<TrackHistoryEntry> history;
};

struct SolveRecord {
  int frame = 0;      ///< frame whose step triggered the solve
  std::string stage;  ///< ocow-1, ocow-2 or oefw
  LmTrace trace;
};

/// Wall-clock milliseconds per stage. Informational only; not serialized
/// with the record.
struct StageTimings {
  double ingest = 0.0;
  double predict = 0.0;
  double association = 0.0;
  double lifecycle = 0.0;
  double ocow = 0.0;
  double promotion = 0.0;
  double oefw = 0.0;
  double total = 0.0;
};

struct RunRecord {
  std::vector<FrameRecord> frames;
  std::vector<TrackRecord> tracks;
  std::vector<SolveRecord> solves;
  StageTimings timings;

  /// Boxes of the reported tracklets, indexed by frame.
  TrackOutput output() const;
  std::vector<Pose> ego_estimates() const;
  /// Final cost of the last OEFW solve, or 0 when none ran.
  double final_oefw_cost() const;
};

/// Runs tracking and optimization over every frame of `scenario`.
/// Throws PipelineError carrying the frame index on failure.
RunRecord run(const Scenario& scenario, const RunConfig& cfg);

/// A raw-initialized window problem over `count` frames starting at
/// `first`: ego poses from odometry, landmarks and object poses from their
/// first observation. Objects are identified by ground truth; static
/// agents get a single pose variable, moving agents one per frame.
struct WindowProblem {
  FactorGraph graph;
  std::vector<int> frames;
};

WindowProblem build_window_problem(const Scenario& scenario, const RunConfig& cfg, int first, int count);

}  // namespace slamot
