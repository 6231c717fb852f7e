#include "doctest.h"
#include "slamot/config.hpp"
#include "slamot/pipeline.hpp"
#include "slamot/run_record.hpp"

using namespace slamot;

namespace {

std::vector<Pose> gt_trajectory(const Scenario& s) {
  std::vector<Pose> out;
  for (const auto& f : s.frames) out.push_back(f.ego_gt);
  return out;
}

Scenario noisy_scenario(std::uint64_t seed, int frames = 40) {
  SimConfig c;
  c.num_frames = frames;
  c.sigma_pos = 0.2;
  c.sigma_yaw = 0.03;
  c.p_miss = 0.05;
  c.p_fp = 0.5;
  c.sigma_pt = 0.02;
  c.sigma_odom_t = 0.05;
  c.sigma_odom_r = 0.01;
  return generate(c, seed);
}

}  // namespace

TEST_CASE("zero noise end to end") {
  SimConfig c;
  c.num_frames = 60;
  const Scenario s = generate(c, 2);
  const RunRecord r = run(s, RunConfig{});
  const MotReport mot = clear_mot(r.output(), s);
  CHECK(mot.mota == doctest::Approx(100.0));
  CHECK(mot.ids == 0);
  TrajConfig raw;
  raw.align = false;
  CHECK(trajectory_errors(r.ego_estimates(), gt_trajectory(s), raw).ape_rmse < 1e-6);
  CHECK(r.final_oefw_cost() < 1e-12);
}

TEST_CASE("runs are deterministic") {
  const Scenario s = noisy_scenario(4);
  RunConfig cfg;
  const std::string a = to_json(run(s, cfg));
  CHECK(a == to_json(run(s, cfg)));
  cfg.concurrent = false;
  CHECK(a == to_json(run(s, cfg)));
  cfg.msga.threads = 4;
  CHECK(a == to_json(run(s, cfg)));
}

TEST_CASE("run record round trip") {
  const RunRecord r = run(noisy_scenario(6, 20), RunConfig{});
  const RunRecord back = run_record_from_json(to_json(r));
  REQUIRE(back.frames.size() == r.frames.size());
  REQUIRE(back.tracks.size() == r.tracks.size());
  REQUIRE(back.solves.size() == r.solves.size());
  for (std::size_t i = 0; i < r.solves.size(); ++i) {
    CHECK(back.solves[i].stage == r.solves[i].stage);
    CHECK(back.solves[i].trace.costs == r.solves[i].trace.costs);
  }
  // poses travel as quaternions
  const auto a = r.ego_estimates(), b = back.ego_estimates();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].matrix().isApprox(b[i].matrix(), 1e-12));
  const TrackOutput oa = r.output(), ob = back.output();
  REQUIRE(oa.size() == ob.size());
  for (std::size_t f = 0; f < oa.size(); ++f) {
    REQUIRE(oa[f].size() == ob[f].size());
    for (std::size_t k = 0; k < oa[f].size(); ++k) {
      CHECK(oa[f][k].id == ob[f][k].id);
      CHECK((oa[f][k].box.center - ob[f][k].box.center).norm() < 1e-12);
    }
  }
  const std::string csv = residuals_csv(r);
  CHECK(csv.rfind("solve,frame,iteration,stage,total_cost", 0) == 0);
}

TEST_CASE("recorded solver traces never increase") {
  const RunRecord r = run(noisy_scenario(8), RunConfig{});
  REQUIRE_FALSE(r.solves.empty());
  for (const auto& s : r.solves) {
    for (std::size_t i = 1; i < s.trace.costs.size(); ++i) CHECK(s.trace.costs[i] <= s.trace.costs[i - 1]);
  }
}

TEST_CASE("ablations and switches") {
  const Scenario s = noisy_scenario(9, 25);
  for (const char* a : {"spatial", "neighborhood", "shape", "ocow", "oefw", "ocow,oefw"}) {
    RunConfig cfg;
    apply_ablations(cfg, a);
    cfg.validate();
    const RunRecord r = run(s, cfg);
    CHECK(r.frames.size() == s.frames.size());
    if (!cfg.use_ocow && !cfg.use_oefw) CHECK(r.solves.empty());
  }
  RunConfig bad;
  CHECK_THROWS_AS(apply_ablation(bad, "colour"), ConfigError);
  bad.window_w = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(parse_weights("0.5,0.5"), ConfigError);
  CHECK(parse_weights("0,1,0").spatial == 1.0);
  CHECK(parse_noise_spec("0.4").sigma_pos == 0.4);
  CHECK(parse_noise_spec("pos=0.1,ego_t=0.2").sigma_ego_t == 0.2);
}

TEST_CASE("keyframe stride") {
  RunConfig cfg;
  cfg.keyframe_stride = 2;
  const Scenario s = noisy_scenario(10, 20);
  const RunRecord r = run(s, cfg);
  int keys = 0;
  for (const auto& f : r.frames) keys += f.keyframe;
  CHECK(keys == 10);
}

TEST_CASE("window problem") {
  const Scenario s = noisy_scenario(12, 20);
  const WindowProblem p = build_window_problem(s, RunConfig{}, 3, 6);
  CHECK(p.frames == std::vector<int>{3, 4, 5, 6, 7, 8});
  CHECK_FALSE(p.graph.factors().empty());
  const InitComparison c = compare_initializations(p.graph, p.frames, LmConfig{});
  CHECK(c.object_centric_final <= c.ego_centric_final * (1 + 1e-6) + 1e-9);
}
