#include <random>

#include <benchmark/benchmark.h>

#include "slamot/assignment.hpp"
#include "slamot/icp.hpp"
#include "slamot/msga.hpp"
#include "slamot/ogo.hpp"
#include "slamot/pipeline.hpp"

using namespace slamot;

namespace {

PointSet cloud(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointSet s;
  for (int i = 0; i < n; ++i) {
    Vec3 p(2.0 * u(rng), 0.9 * u(rng), 0.75 * u(rng));
    const int face = i % 3;
    p[face] = (u(rng) < 0 ? -1.0 : 1.0) * Vec3(2.0, 0.9, 0.75)[face];
    s.points.push_back(p);
  }
  return s;
}

}  // namespace

static void BM_Giou(benchmark::State& state) {
  const Box3 a{{0, 0, 0}, {4.5, 1.9, 1.6}, 0.3};
  const Box3 b{{1.1, 0.4, 0.1}, {4.2, 1.8, 1.5}, -0.4};
  for (auto _ : state) benchmark::DoNotOptimize(giou3d(a, b));
}
BENCHMARK(BM_Giou);

static void BM_IcpYawHypotheses(benchmark::State& state) {
  const PointSet src = cloud(static_cast<int>(state.range(0)), 1);
  const PointSet dst = transform_points(Pose::from_yaw(0.2, {0.3, -0.1, 0}), src, PointFrame::world);
  const IcpConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(icp_with_yaw_hypotheses(src, dst, Pose::identity(), cfg));
}
BENCHMARK(BM_IcpYawHypotheses)->Arg(50)->Arg(100)->Arg(200);

static void BM_KuhnMunkres(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScoreMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m.set(r, c, u(rng));
  for (auto _ : state) benchmark::DoNotOptimize(solve_max_assignment(m));
}
BENCHMARK(BM_KuhnMunkres)->Arg(10)->Arg(40)->Arg(100);

static void BM_WindowSolve(benchmark::State& state) {
  SimConfig c;
  c.num_frames = 20;
  c.sigma_pos = 0.2;
  c.sigma_odom_t = 0.1;
  c.sigma_odom_r = 0.02;
  const Scenario s = generate(c, 4242);
  const WindowProblem p = build_window_problem(s, RunConfig{}, 2, 8);
  const LmConfig cfg;
  for (auto _ : state) {
    FactorGraph g = p.graph;
    benchmark::DoNotOptimize(solve_joint(g, p.frames, cfg));
  }
}
BENCHMARK(BM_WindowSolve)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
