#include "slamot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Geometry>
#include "json.hpp"

namespace slamot {

namespace {

struct Candidate {
  double dist;
  int gt;
  int est;
};

double rmse(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

MotReport clear_mot(const TrackOutput& est, const Scenario& gt, const MotConfig& cfg) {
  if (est.size() != gt.frames.size()) {
    throw EvaluationError("frame count mismatch: " + std::to_string(est.size()) + " estimated vs " +
                          std::to_string(gt.frames.size()) + " ground-truth frames");
  }
  MotReport rep;
  std::map<int, int> last_match;  // gt id -> est id of the most recent match
  double iou_sum = 0.0;

  for (std::size_t f = 0; f < gt.frames.size(); ++f) {
    const Frame& frame = gt.frames[f];
    std::map<int, Box3> gt_boxes;
    for (const auto& a : frame.agents) {
      if (a.visible) gt_boxes.emplace(a.id, gt.gt_box(frame, a));
    }
    std::map<int, const Box3*> est_boxes;
    for (const auto& e : est[f]) est_boxes.emplace(e.id, &e.box);

    MotFrameCounts c;
    c.frame = frame.index;
    c.gt = static_cast<int>(gt_boxes.size());

    std::map<int, int> pairs;  // gt -> est
    std::set<int> used_est;
    for (const auto& [g, box] : gt_boxes) {
      const auto prev = last_match.find(g);
      if (prev == last_match.end()) continue;
      const auto e = est_boxes.find(prev->second);
      if (e == est_boxes.end() || used_est.count(e->first)) continue;
      if ((e->second->center - box.center).norm() < cfg.match_thresh) {
        pairs[g] = e->first;
        used_est.insert(e->first);
      }
    }

    std::vector<Candidate> cands;
    for (const auto& [g, box] : gt_boxes) {
      if (pairs.count(g)) continue;
      for (const auto& [id, eb] : est_boxes) {
        if (used_est.count(id)) continue;
        const double d = (eb->center - box.center).norm();
        if (d < cfg.match_thresh) cands.push_back({d, g, id});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.gt != b.gt) return a.gt < b.gt;
      return a.est < b.est;
    });
    for (const auto& cand : cands) {
      if (pairs.count(cand.gt) || used_est.count(cand.est)) continue;
      pairs[cand.gt] = cand.est;
      used_est.insert(cand.est);
    }

    for (const auto& [g, e] : pairs) {
      const auto prev = last_match.find(g);
      if (prev != last_match.end() && prev->second != e) ++c.switches;
      last_match[g] = e;
      iou_sum += iou3d(gt_boxes.at(g), *est_boxes.at(e));
    }
    c.tp = static_cast<int>(pairs.size());
    c.fn = c.gt - c.tp;
    c.fp = static_cast<int>(est_boxes.size()) - c.tp;

    rep.gt += c.gt;
    rep.tp += c.tp;
    rep.fp += c.fp;
    rep.fn += c.fn;
    rep.ids += c.switches;
    rep.frames.push_back(c);
  }

  const double errors = rep.fn + rep.fp + rep.ids;
  if (rep.gt > 0) {
    rep.mota = 100.0 * (1.0 - errors / rep.gt);
  } else {
    rep.mota = errors == 0 ? 100.0 : -100.0 * errors;
  }
  rep.motp = rep.tp > 0 ? 100.0 * iou_sum / rep.tp : 0.0;
  rep.recall = rep.gt > 0 ? static_cast<double>(rep.tp) / rep.gt : 1.0;
  rep.precision = rep.tp + rep.fp > 0 ? static_cast<double>(rep.tp) / (rep.tp + rep.fp) : 1.0;
  return rep;
}

TrajReport trajectory_errors(const std::vector<Pose>& est, const std::vector<Pose>& gt, const TrajConfig& cfg) {
  if (est.size() != gt.size()) {
    throw EvaluationError("trajectory length mismatch: " + std::to_string(est.size()) + " vs " +
                          std::to_string(gt.size()));
  }
  if (est.size() < 2) throw EvaluationError("trajectories need at least two poses");
  if (cfg.rpe_step < 1) throw EvaluationError("rpe_step must be >= 1");

  const auto n = static_cast<Eigen::Index>(est.size());
  Pose align = Pose::identity();
  if (cfg.align) {
    Eigen::Matrix3Xd src(3, n), dst(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      src.col(i) = est[i].translation();
      dst.col(i) = gt[i].translation();
    }
    align = Pose::from_matrix(Eigen::umeyama(src, dst, false));
  }

  TrajReport rep;
  for (std::size_t i = 0; i < est.size(); ++i) {
    rep.ape_errors.push_back(((align * est[i]).translation() - gt[i].translation()).norm());
  }
  const auto step = static_cast<std::size_t>(cfg.rpe_step);
  for (std::size_t i = 0; i + step < est.size(); ++i) {
    const Pose rel_est = est[i].inverse() * est[i + step];
    const Pose rel_gt = gt[i].inverse() * gt[i + step];
    rep.rpe_errors.push_back((rel_gt.inverse() * rel_est).translation().norm());
  }
  rep.ape_rmse = rmse(rep.ape_errors);
  rep.rpe_rmse = rmse(rep.rpe_errors);
  return rep;
}

MeanInterval bootstrap_mean_ci(const std::vector<double>& samples, double confidence, int resamples,
                               std::uint64_t seed) {
  MeanInterval out;
  if (samples.empty()) return out;
  const auto n = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(static_cast<std::size_t>(std::max(1, resamples)));
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += samples[pick(rng)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - confidence) / 2.0;
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  out.lower = quantile(alpha);
  out.upper = quantile(1.0 - alpha);
  return out;
}

std::string to_json(const MotReport& r) {
  nlohmann::json j;
  j["mota"] = r.mota;
  j["motp"] = r.motp;
  j["ids"] = r.ids;
  j["recall"] = r.recall;
  j["precision"] = r.precision;
  j["gt"] = r.gt;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  return j.dump(2);
}

std::string to_json(const TrajReport& r) {
  nlohmann::json j;
  j["ape_rmse"] = r.ape_rmse;
  j["rpe_rmse"] = r.rpe_rmse;
  j["ape_errors"] = r.ape_errors;
  j["rpe_errors"] = r.rpe_errors;
  return j.dump(2);
}

std::string per_frame_csv(const MotReport& mot, const TrajReport& traj) {
  std::ostringstream os;
  os.precision(17);
  os << "frame,gt,tp,fp,fn,switches,ape\n";
  for (std::size_t i = 0; i < mot.frames.size(); ++i) {
    const auto& c = mot.frames[i];
    os << c.frame << ',' << c.gt << ',' << c.tp << ',' << c.fp << ',' << c.fn << ',' << c.switches << ',';
    if (i < traj.ape_errors.size()) os << traj.ape_errors[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace slamot
