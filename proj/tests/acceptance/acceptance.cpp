// Acceptance driver: one PASS/FAIL line per criterion on stdout, details on
// stderr, artifacts (residual curves, per-seed tables) under --out.
//
// Exits 0 once every criterion has been evaluated; with --strict it exits 1
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "slamot/config.hpp"
#include "slamot/factor_graph.hpp"
#include "slamot/metrics.hpp"
#include "slamot/msga.hpp"
#include "slamot/ogo.hpp"
#include "slamot/pipeline.hpp"
#include "slamot/run_record.hpp"
#include "slamot/simulator.hpp"
#include "slamot/tracking.hpp"

namespace fs = std::filesystem;
using namespace slamot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Collects named checks; any failed check fails the criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << std::setprecision(12) << got << ", want " << want;
      failures_.push_back(os.str());
    }
  }
  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::vector<Pose> gt_trajectory(const Scenario& s) {
  std::vector<Pose> out;
  for (const auto& f : s.frames) out.push_back(f.ego_gt);
  return out;
}

/// Every accepted LM step across every recorded solve must not raise the cost.
struct MonotoneLedger {
  long traces = 0;
  long violations = 0;
  void add(const RunRecord& r) {
    for (const auto& s : r.solves) add(s.trace);
  }
  void add(const LmTrace& t) {
    ++traces;
    for (std::size_t i = 1; i < t.costs.size(); ++i)
      if (t.costs[i] > t.costs[i - 1]) ++violations;
  }
};

MeanInterval paired_ci(const std::vector<double>& hi, const std::vector<double>& lo) {
  std::vector<double> d;
  for (std::size_t i = 0; i < hi.size(); ++i) d.push_back(hi[i] - lo[i]);
  return bootstrap_mean_ci(d);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

// ---------------------------------------------------------------------------

Outcome analytic_suite() {
  const auto t0 = Clock::now();
  Checks c;
  const Box3 a{Vec3::Zero(), Vec3::Ones(), 0.0};
  const Box3 half{Vec3(0.5, 0, 0), Vec3::Ones(), 0.0};
  const Box3 far{Vec3(10, 0, 0), Vec3::Ones(), 0.0};

  c.near(frobenius_deviation(Pose::identity()), 0.0, 1e-9, "frobenius identity");
  c.near(frobenius_deviation(Pose::from_translation({1, 0, 0})), 1.0, 1e-6, "frobenius translation");
  c.near(frobenius_deviation(Pose::from_yaw(M_PI)), std::sqrt(8.0), 1e-6, "frobenius yaw pi");

  c.near(edge_consistency(Pose::from_yaw(0.3, {1, 2, 0}), Pose::from_yaw(0.3, {1, 2, 0})), 1.0, 1e-6, "edge identical");
  c.near(edge_consistency(Pose::from_translation({1, 0, 0}), Pose::identity()), std::exp(-1.0), 1e-6, "edge e^-1");
  c.near(edge_consistency(Pose::from_yaw(M_PI), Pose::identity()), std::exp(-std::sqrt(8.0)), 1e-6, "edge e^-sqrt8");

  c.near(intersection_volume(a, a), 1.0, 1e-9, "intersection self");
  c.near(intersection_volume(a, far), 0.0, 1e-9, "intersection disjoint");
  c.near(intersection_volume(a, half), 0.5, 1e-9, "intersection offset");
  c.near(giou3d(a, a), 1.0, 1e-9, "giou self");
  c.near(giou3d(a, half), 1.0 / 3.0, 1e-9, "giou offset");
  c.near(giou3d(a, far), -9.0 / 11.0, 1e-9, "giou disjoint");
  c.near(ngiou(a, a), 1.0, 1e-9, "ngiou self");
  c.near(ngiou(a, far), 1.0 / 11.0, 1e-9, "ngiou disjoint");
  c.near(ngiou(a, half), 2.0 / 3.0, 1e-9, "ngiou offset");

  const IcpConfig icp;
  const PointSet p = oracle::box_surface_cloud(200, 3);
  c.near(shape_score(p, p, icp), 1.0, 1e-9, "shape identical");
  IcpConfig wide = icp;
  wide.max_correspondence_distance = 0.5;
  wide.yaw_hypotheses = 1;
  PointSet far_cloud;
  for (const auto& q : p.points) far_cloud.points.push_back(q + Vec3(100, 0, 0));
  c.near(shape_score(p, far_cloud, wide), 0.0, 1e-9, "shape 100 m apart");
  IcpConfig tight = icp;
  tight.max_correspondence_distance = 0.1;
  Vec3 centroid = Vec3::Zero();
  for (const auto& q : p.points) centroid += q;
  centroid /= p.size();
  const Pose rot = Pose::from_translation(centroid) * Pose::from_yaw(10.0 * M_PI / 180.0) *
                   Pose::from_translation(-centroid);
  PointSet rotated;
  for (const auto& q : p.points) rotated.points.push_back(rot * q);
  c.expect(shape_score(p, rotated, tight) >= 0.95, "shape 10 degree rotation >= 0.95");
  const IcpResult r = icp_with_yaw_hypotheses(p, rotated, Pose::identity(), tight);
  c.expect(so3_log(r.transform.rotation() * rot.rotation().transpose()).norm() < M_PI / 180.0,
           "icp recovers the rotation within 1 degree");

  const Pose ego = Pose::from_yaw(0.4, {3, -1, 0.2}), det = Pose::from_yaw(-0.2, {7, 2, 0});
  for (auto base : {ObjectResidualBase::sensor, ObjectResidualBase::object}) {
    c.near(residual_object(ego, ego * det, det, base), 0.0, 1e-9, "residual_object consistent");
    c.near(residual_object(Pose::identity(), Pose::from_translation({1, 0, 0}), Pose::identity(), base), 1.0, 1e-6,
           "residual_object unit offset");
    c.near(residual_object(Pose::identity(), Pose::from_translation({0, 0, 2}), Pose::identity(), base), 2.0, 1e-6,
           "residual_object scaling");
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 1.0, "runtime " + fmt(elapsed) + " s >= 1 s");
  return {1, "analytic score suite", c.ok(), c.ok() ? fmt(elapsed, 3) + " s" : c.summary()};
}

Outcome assignment_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ScoreMatrix m = oracle::random_gated_matrix(rng, 6);
    const MatchResult km = km_assign(m, 0.5);
    std::vector<int> row_to_col(m.rows(), -1);
    for (const auto& p : km.pairs) row_to_col[p.detection] = p.tracklet;
    if (oracle::assignment_total(m, row_to_col) != oracle::brute_force_assign(m, 0.5).total) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  const bool ok = mismatches == 0 && elapsed < 10.0;
  return {2, "assignment oracle", ok, std::to_string(mismatches) + " mismatches in 1000 trials, " + fmt(elapsed) + " s"};
}

Outcome zero_noise(MonotoneLedger& ledger) {
  const auto t0 = Clock::now();
  SimConfig c;
  c.num_agents = 20;
  c.num_frames = 100;
  const Scenario s = generate(c, 1);
  const RunRecord r = run(s, RunConfig{});
  ledger.add(r);
  const MotReport mot = clear_mot(r.output(), s);
  TrajConfig raw;
  raw.align = false;
  const double ape = trajectory_errors(r.ego_estimates(), gt_trajectory(s), raw).ape_rmse;
  const double cost = r.final_oefw_cost();
  const double elapsed = seconds_since(t0);
  const bool ok = mot.mota == 100.0 && mot.ids == 0 && ape < 1e-6 && cost < 1e-12 && elapsed < 30.0;
  std::ostringstream os;
  os << "MOTA " << mot.mota << ", IDS " << mot.ids << ", APE " << std::scientific << std::setprecision(2) << ape
     << " m, OEFW cost " << cost << ", " << std::fixed << std::setprecision(1) << elapsed << " s";
  return {3, "zero-noise end-to-end", ok, os.str()};
}

Outcome noise_trend(MonotoneLedger& ledger, const fs::path& out) {
  const auto t0 = Clock::now();
  const std::vector<double> sigmas{0.0, 0.2, 0.4, 0.6, 0.8};
  const int seeds = 20;
  RunConfig full;
  RunConfig spatial;
  apply_ablations(spatial, "neighborhood,shape");

  std::ofstream table(out / "noise_trend.csv");
  table << "seed,sigma,variant,mota\n";
  std::vector<double> means;
  Checks c;
  std::string margins;
  for (double sigma : sigmas) {
    std::vector<double> mf, ms;
    for (int i = 0; i < seeds; ++i) {
      SimConfig cfg;
      cfg.sigma_pos = sigma;
      const Scenario s = generate(cfg, 100 + i);
      const RunRecord rf = run(s, full);
      ledger.add(rf);
      mf.push_back(clear_mot(rf.output(), s).mota);
      table << 100 + i << ',' << sigma << ",full," << mf.back() << '\n';
      if (sigma >= 0.4) {
        const RunRecord rs = run(s, spatial);
        ledger.add(rs);
        ms.push_back(clear_mot(rs.output(), s).mota);
        table << 100 + i << ',' << sigma << ",spatial," << ms.back() << '\n';
      }
    }
    means.push_back(mean(mf));
    std::cerr << "  sigma " << sigma << ": full MOTA " << fmt(means.back(), 2);
    if (!ms.empty()) {
      const MeanInterval d = paired_ci(mf, ms);
      std::cerr << ", spatial " << fmt(mean(ms), 2) << ", margin CI [" << fmt(d.lower, 2) << ", " << fmt(d.upper, 2)
                << "]";
      c.expect(d.lower > 0.0, "margin at sigma " + fmt(sigma, 1) + " not above 0 (CI lower " + fmt(d.lower, 2) + ")");
      margins += (margins.empty() ? "" : " ") + fmt(d.lower, 2);
    }
    std::cerr << " (" << fmt(seconds_since(t0), 0) << " s)\n";
  }
  int inversions = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[i - 1]) {
      ++inversions;
      worst = std::max(worst, means[i] - means[i - 1]);
    }
  }
  c.expect(inversions <= 1 && worst <= 1.0, std::to_string(inversions) + " inversions, largest " + fmt(worst, 2));
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 600.0, "runtime " + fmt(elapsed, 0) + " s");
  std::string trend;
  for (double m : means) trend += (trend.empty() ? "" : " > ") + fmt(m, 1);
  return {4, "noise robustness trend", c.ok(),
          c.ok() ? "MOTA " + trend + "; margin CI lower " + margins + "; " + fmt(elapsed, 0) + " s" : c.summary()};
}

SimConfig congested_family() {
  SimConfig c;
  c.num_agents = 40;
  c.gap_min = 2.0;
  c.gap_max = 5.0;
  c.sigma_pos = 0.2;
  c.sigma_yaw = 0.03;
  c.sigma_dim = 0.05;
  c.p_miss = 0.05;
  c.p_fp = 0.5;
  c.sigma_pt = 0.02;
  c.sigma_odom_t = 0.1;
  c.sigma_odom_r = 0.02;
  c.num_landmarks = 30;
  c.sigma_landmark = 0.1;
  return c;
}

constexpr int kCongestedSeeds = 20;
constexpr std::uint64_t kCongestedSeed0 = 1000;

Outcome ablations(MonotoneLedger& ledger, const fs::path& out) {
  const auto t0 = Clock::now();
  struct Variant {
    const char* name;
    const char* ablate;
  };
  const std::vector<Variant> variants{{"spatial", "neighborhood,shape"},
                                      {"spatial+neighborhood", "shape"},
                                      {"all", ""},
                                      {"ocow-only", "oefw"},
                                      {"oefw-only", "ocow"}};
  std::vector<std::vector<double>> mota(variants.size()), ape(variants.size());
  std::ofstream table(out / "ablations.csv");
  table << "seed,variant,mota,ape\n";
  for (int i = 0; i < kCongestedSeeds; ++i) {
    const Scenario s = generate(congested_family(), kCongestedSeed0 + i);
    const auto gt = gt_trajectory(s);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      RunConfig cfg;
      apply_ablations(cfg, variants[v].ablate);
      const RunRecord r = run(s, cfg);
      ledger.add(r);
      mota[v].push_back(clear_mot(r.output(), s).mota);
      ape[v].push_back(trajectory_errors(r.ego_estimates(), gt).ape_rmse);
      table << kCongestedSeed0 + i << ',' << variants[v].name << ',' << mota[v].back() << ',' << ape[v].back()
            << '\n';
    }
    std::cerr << "  congested seed " << kCongestedSeed0 + i << " done (" << fmt(seconds_since(t0), 0) << " s)\n";
  }
  for (std::size_t v = 0; v < variants.size(); ++v)
    std::cerr << "  " << variants[v].name << ": MOTA " << fmt(mean(mota[v]), 2) << ", APE " << fmt(mean(ape[v]), 4)
              << " m\n";

  // An ordering a <= b holds with 95% confidence when the bootstrap interval
  // of the paired difference b - a lies at or above zero.
  Checks c;
  std::string shown;
  auto ordering = [&](const std::vector<double>& lo, const std::vector<double>& hi, const std::string& label) {
    const MeanInterval d = paired_ci(hi, lo);
    shown += (shown.empty() ? "" : "; ") + label + " CI [" + fmt(d.lower, 4) + ", " + fmt(d.upper, 4) + "]";
    c.expect(d.lower >= 0.0, label + " (difference CI [" + fmt(d.lower, 4) + ", " + fmt(d.upper, 4) + "])");
  };
  ordering(mota[0], mota[1], "MOTA spatial <= spatial+neighborhood");
  ordering(mota[1], mota[2], "MOTA spatial+neighborhood <= all");
  ordering(ape[2], ape[3], "APE both <= ocow-only");
  ordering(ape[2], ape[4], "APE both <= oefw-only");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 900.0, "runtime " + fmt(elapsed, 0) + " s");
  return {5, "ablation orderings", c.ok(), c.ok() ? shown + "; " + fmt(elapsed, 0) + " s" : "failed: " + c.summary()};
}

Outcome optimization(MonotoneLedger& ledger, const fs::path& out) {
  const auto t0 = Clock::now();
  Checks c;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  auto random_pose = [&](double ts, double rs) {
    return Pose(so3_exp(Vec3(n(rng), n(rng), n(rng)) * rs), Vec3(n(rng), n(rng), n(rng)) * ts);
  };
  auto max_diff = [](const Pose& a, const Pose& b) { return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff(); };

  // stage-2 single frame closed form
  for (int trial = 0; trial < 5; ++trial) {
    FactorGraph g;
    const Pose ego = random_pose(5, 1), det = random_pose(8, 0.5);
    g.add_variable(VarKey::ego(0), {VariableKind::ego_pose, ego, Vec3::Zero(), true});
    g.add_variable(VarKey::object(0, 0), {VariableKind::object_pose, ego * det * random_pose(0.3, 0.1)});
    Factor f;
    f.kind = FactorKind::object_detection;
    f.ego = VarKey::ego(0);
    f.other = VarKey::object(0, 0);
    f.observed_pose = det;
    f.weight = OgoWeights{}.object;
    f.robust = true;
    g.add_factor(f);
    const OcowResult r = solve_ocow(g, std::vector<int>{0}, LmConfig{});
    ledger.add(r.stage1);
    ledger.add(r.stage2);
    c.expect(max_diff(g.at(VarKey::object(0, 0)).pose, ego * det) < 1e-9, "stage-2 closed form");
  }

  // chordal mean over detections of one static object from fixed egos
  {
    LmConfig cfg;
    cfg.robust_objects = false;
    cfg.max_iterations = 200;
    cfg.relative_tolerance = 1e-14;
    for (int trial = 0; trial < 5; ++trial) {
      FactorGraph g;
      const Pose obj = random_pose(10, 0.5);
      std::vector<Pose> loops;
      std::vector<int> frames;
      for (int f = 0; f < 8; ++f) {
        const Pose ego = random_pose(5, 0.3);
        g.add_variable(VarKey::ego(f), {VariableKind::ego_pose, ego, Vec3::Zero(), true});
        Factor fac;
        fac.kind = FactorKind::object_detection;
        fac.frame = f;
        fac.ego = VarKey::ego(f);
        fac.other = VarKey::object(0, 0);
        fac.observed_pose = ego.inverse() * obj * random_pose(0.2, 0.05);
        g.add_factor(fac);
        loops.push_back(ego * fac.observed_pose);
        frames.push_back(f);
      }
      g.add_variable(VarKey::object(0, 0), {VariableKind::object_pose, loops.front()});
      const OcowResult r = solve_ocow(g, frames, cfg);
      ledger.add(r.stage2);
      c.expect(max_diff(g.at(VarKey::object(0, 0)).pose, oracle::chordal_mean_reference(loops)) < 1e-6,
               "chordal mean oracle");
    }
  }

  // gauge invariance on a noisy window
  {
    SimConfig sc = congested_family();
    sc.num_frames = 20;
    const Scenario s = generate(sc, 4242);
    const WindowProblem p = build_window_problem(s, RunConfig{}, 2, 8);
    const Pose T = random_pose(20, 1);
    FactorGraph moved = p.graph;
    for (const auto& [key, v] : p.graph.variables()) {
      moved.at(key).pose = T * v.pose;
      moved.at(key).point = T * v.point;
    }
    const double a = p.graph.total_cost(LmConfig{}), b = moved.total_cost(LmConfig{});
    c.expect(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)), "gauge invariance");
  }

  // object-centric vs ego-centric initialization on the congested family
  std::ofstream curves(out / "residual_curves.csv");
  curves << "seed,strategy,step,cost\n";
  int worse = 0;
  double ratio_sum = 0.0;
  for (int i = 0; i < kCongestedSeeds; ++i) {
    SimConfig sc = congested_family();
    sc.num_frames = 30;
    const Scenario s = generate(sc, kCongestedSeed0 + i);
    const WindowProblem p = build_window_problem(s, RunConfig{}, 5, 10);
    const InitComparison cmp = compare_initializations(p.graph, p.frames, LmConfig{});
    for (const LmTrace* t : {&cmp.ego_centric, &cmp.object_stage1, &cmp.object_stage2, &cmp.object_fused})
      ledger.add(*t);
    if (cmp.object_centric_final > cmp.ego_centric_final * (1 + 1e-6) + 1e-9) ++worse;
    ratio_sum += cmp.object_centric_final / std::max(cmp.ego_centric_final, 1e-300);
    int step = 0;
    for (double v : cmp.ego_centric.monitor_costs) curves << kCongestedSeed0 + i << ",ego-centric," << step++ << ',' << v << '\n';
    step = 0;
    for (const LmTrace* t : {&cmp.object_stage1, &cmp.object_stage2, &cmp.object_fused})
      for (double v : t->monitor_costs) curves << kCongestedSeed0 + i << ",object-centric," << step++ << ',' << v << '\n';
  }
  c.expect(worse == 0, std::to_string(worse) + " seeds where object-centric ends above ego-centric");
  c.expect(ledger.violations == 0,
           std::to_string(ledger.violations) + " cost increases over " + std::to_string(ledger.traces) + " traces");
  std::ostringstream os;
  os << ledger.traces << " traces monotone; object/ego final cost ratio " << fmt(ratio_sum / kCongestedSeeds, 4)
     << "; curves in residual_curves.csv; " << fmt(seconds_since(t0), 1) << " s";
  return {6, "optimization properties", c.ok(), c.ok() ? os.str() : c.summary()};
}

Outcome determinism() {
  const auto t0 = Clock::now();
  Checks c;
  std::vector<std::pair<Scenario, std::string>> cases;
  cases.emplace_back(generate(congested_family(), kCongestedSeed0), "all");
  {
    SimConfig sc;
    sc.sigma_pos = 0.4;
    sc.p_fp = 1.0;
    sc.sigma_odom_t = 0.05;
    cases.emplace_back(generate(sc, 7), "shape");
  }
  for (const auto& [s, ablate] : cases) {
    RunConfig cfg;
    if (ablate != "all") apply_ablations(cfg, ablate);
    cfg.concurrent = true;
    const std::string a = to_json(run(s, cfg)), b = to_json(run(s, cfg));
    cfg.concurrent = false;
    const std::string d = to_json(run(s, cfg)), e = to_json(run(s, cfg));
    c.expect(a == b, "concurrent runs differ");
    c.expect(d == e, "sequential runs differ");
    c.expect(a == d, "concurrent and sequential runs differ");
  }
  return {7, "determinism", c.ok(), c.ok() ? "byte-identical records, " + fmt(seconds_since(t0), 1) + " s" : c.summary()};
}

Outcome filter() {
  Checks c;
  const TrackerConfig cfg;
  auto min_eig = [](const TrackCov& P) { return Eigen::SelfAdjointEigenSolver<TrackCov>(P).eigenvalues().minCoeff(); };

  Tracklet t;
  t.state << 1, 2, 0.5, 0.2, 4, 1.8, 1.5, 1, 0, 0, 0;
  t.covariance = TrackCov::Identity() * 0.5;
  const Tracklet p = predict(t, 0.1, cfg);
  c.near(p.state(0), 1.1, 1e-12, "predict x");
  c.expect(min_eig(p.covariance) >= -1e-9, "predicted covariance PSD");

  const Tracklet u = update(p, p.box(), cfg);
  c.expect((u.state - p.state).norm() < 1e-12, "zero innovation keeps the state");
  c.expect(u.covariance.trace() < p.covariance.trace(), "zero innovation shrinks the covariance");
  c.expect(min_eig(u.covariance) >= -1e-9, "updated covariance PSD");

  TrackerConfig loose = cfg;
  loose.r_pos *= 1e3;
  loose.r_yaw *= 1e3;
  loose.r_dim *= 1e3;
  Box3 z = p.box();
  z.center += Vec3(2, -1, 0.5);
  const Tracklet l = update(p, z, loose);
  c.expect((l.state - p.state).cwiseAbs().maxCoeff() < 1e-3, "large-R limit keeps the prior");

  Tracklet w = p;
  w.state(3) = 3.1;
  Box3 wz = w.box();
  wz.yaw = -3.1;
  const Tracklet wu = update(w, wz, cfg);
  const double step = wrap_angle(wu.state(3) - 3.1);
  c.expect(step > 0.0 && step < 2 * M_PI - 6.2 + 1e-12, "yaw innovation wrapped to the short way");

  TrackerConfig exact = cfg;
  exact.r_pos = exact.r_yaw = exact.r_dim = 0.0;
  exact.q_pos = exact.q_yaw = exact.q_dim = 0.0;
  const Vec3 v(3.0, -1.0, 0.2);
  auto gt = [&](int k) { return Box3{Vec3(5, 1, 0) + v * (k * 0.1), Vec3(4.2, 1.9, 1.6), 0.1 + 0.3 * k * 0.1}; };
  Tracklet cv = make_birth(0, {0, gt(0), {}}, 0, exact);
  for (int k = 1; k <= 2; ++k) cv = update(predict(cv, 0.1, exact), gt(k), exact);
  TrackState expected;
  expected << gt(2).center, gt(2).yaw, gt(2).dims, v, 0.3;
  c.expect((cv.state - expected).cwiseAbs().maxCoeff() < 1e-9, "constant velocity recovered after 2 updates");
  return {8, "filter correctness", c.ok(), c.ok() ? "all checks hold" : c.summary()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slamot acceptance criteria"};
  std::string out = "acceptance_out";
  bool strict = false;
  app.add_option("--out", out, "directory for tables and residual curves");
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);

  MonotoneLedger ledger;
  std::vector<Outcome> results;
  const std::vector<std::function<Outcome()>> steps{
      [] { return analytic_suite(); },
      [] { return assignment_oracle(); },
      [&] { return zero_noise(ledger); },
      [&] { return noise_trend(ledger, out); },
      [&] { return ablations(ledger, out); },
      [&] { return optimization(ledger, out); },
      [] { return determinism(); },
      [] { return filter(); },
  };
  for (const auto& step : steps) {
    Outcome o;
    try {
      o = step();
    } catch (const std::exception& e) {
      o = {static_cast<int>(results.size()) + 1, "criterion", false, std::string("exception: ") + e.what()};
    }
    std::cerr << "[" << o.id << "] " << (o.pass ? "PASS" : "FAIL") << ' ' << o.name << ": " << o.detail << '\n';
    results.push_back(o);
  }

  bool all = true;
  for (const auto& o : results) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << o.id << " (" << o.name << "): " << o.detail << '\n';
    all = all && o.pass;
  }
  return strict && !all ? 1 : 0;
}
