#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "slamot/geometry.hpp"
#include "slamot/simulator.hpp"

namespace slamot {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EstimatedObject {
  int id = 0;
  Box3 box;  ///< world frame
};

/// Tracker output indexed by frame.
using TrackOutput = std::vector<std::vector<EstimatedObject>>;

struct MotFrameCounts {
  int frame = 0;
  int gt = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int switches = 0;
};

struct MotReport {
  double mota = 0.0;  ///< percent
  double motp = 0.0;  ///< mean IoU of true positives, percent
  int ids = 0;
  double recall = 0.0;
  double precision = 0.0;
  int gt = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<MotFrameCounts> frames;
};

struct MotConfig {
  double match_thresh = 2.0;  ///< center distance gate (m)
};

/// CLEAR-MOT against the visible ground-truth agents of `gt`. Pairings from
/// the previous frame are kept while still within the gate; the remaining
/// objects are matched greedily by center distance.
MotReport clear_mot(const TrackOutput& est, const Scenario& gt, const MotConfig& cfg = {});

struct TrajConfig {
  bool align = true;  ///< rigid Umeyama alignment of the estimate before APE
  int rpe_step = 1;
};

struct TrajReport {
  double ape_rmse = 0.0;
  double rpe_rmse = 0.0;
  std::vector<double> ape_errors;  ///< per frame
  std::vector<double> rpe_errors;  ///< per step
};

TrajReport trajectory_errors(const std::vector<Pose>& est, const std::vector<Pose>& gt, const TrajConfig& cfg = {});

/// Percentile bootstrap interval for the mean.
struct MeanInterval {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

MeanInterval bootstrap_mean_ci(const std::vector<double>& samples, double confidence = 0.95, int resamples = 2000,
                               std::uint64_t seed = 7);

std::string to_json(const MotReport& r);
std::string to_json(const TrajReport& r);
/// One row per frame: frame,gt,tp,fp,fn,switches,ape
std::string per_frame_csv(const MotReport& mot, const TrajReport& traj);

}  // namespace slamot
