// slamot: scenario generation, tracking runs, evaluation and sweeps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slamot/config.hpp"
#include "slamot/metrics.hpp"
#include "slamot/pipeline.hpp"
#include "slamot/run_record.hpp"
#include "slamot/scenario_io.hpp"
#include "slamot/simulator.hpp"

namespace fs = std::filesystem;
using namespace slamot;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeFailure = 3;

struct Options {
  std::string scenario;
  std::string run_file;
  std::uint64_t seed = 1;
  int k = 3;
  double L = 5.0;
  double tau = 0.5;
  std::string lambda = "0.3,0.4,0.3";
  int window_w = 4;
  std::string noise_sigma;
  std::string ablate;
  bool dump_residuals = false;
  std::string out = "out";

  int keyframe_stride = 1;
  int threads = 1;
  bool sequential = false;
  std::string giou_mode = "enclosing";
  std::string object_residual = "object";
  double match_thresh = 2.0;
  bool no_align = false;

  SimConfig sim;

  std::string sigmas = "0,0.2,0.4,0.6,0.8";
  int seeds = 5;
  std::string variants = "full";
};

RunConfig make_run_config(const Options& o) {
  RunConfig cfg;
  cfg.graph.k = o.k;
  cfg.set_radius(o.L);
  cfg.msga.tau = o.tau;
  cfg.msga.weights = parse_weights(o.lambda);
  cfg.msga.threads = o.threads;
  if (o.giou_mode == "enclosing") {
    cfg.msga.giou_mode = GiouMode::enclosing;
  } else if (o.giou_mode == "literal") {
    cfg.msga.giou_mode = GiouMode::literal;
  } else {
    throw ConfigError("giou-mode: expected enclosing or literal");
  }
  if (o.object_residual == "object") {
    cfg.lm.object_residual = ObjectResidualBase::object;
  } else if (o.object_residual == "sensor") {
    cfg.lm.object_residual = ObjectResidualBase::sensor;
  } else {
    throw ConfigError("object-residual: expected object or sensor");
  }
  cfg.window_w = o.window_w;
  cfg.tracker.active_window = o.window_w;
  cfg.keyframe_stride = o.keyframe_stride;
  cfg.concurrent = !o.sequential;
  apply_ablations(cfg, o.ablate);
  cfg.validate();
  return cfg;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

Scenario load_input(const Options& o) {
  if (o.scenario.empty()) throw ConfigError("scenario: --scenario is required");
  if (!fs::exists(o.scenario)) throw ConfigError("scenario: no such file '" + o.scenario + "'");
  Scenario s = load_scenario(o.scenario);
  if (!o.noise_sigma.empty()) {
    const NoiseSpec n = parse_noise_spec(o.noise_sigma);
    s = inject_noise(s, n, o.seed);
  }
  return s;
}

void print_summary(const MotReport& mot, const TrajReport& traj) {
  std::cout << "MOTA " << mot.mota << "  MOTP " << mot.motp << "  IDS " << mot.ids << "  recall " << mot.recall
            << "  precision " << mot.precision << "  APE " << traj.ape_rmse << "  RPE " << traj.rpe_rmse << '\n';
}

int cmd_generate(const Options& o) {
  o.sim.validate();
  const Scenario s = generate(o.sim, o.seed);
  const fs::path path = fs::path(o.out) / "scenario.jsonl";
  fs::create_directories(o.out);
  save_scenario(path, s);
  std::cout << "wrote " << path.string() << " (" << s.frames.size() << " frames, " << s.agents.size()
            << " agents)\n";
  return kOk;
}

int cmd_run(const Options& o) {
  const RunConfig cfg = make_run_config(o);
  const Scenario s = load_input(o);
  const RunRecord r = run(s, cfg);
  const fs::path out(o.out);
  write_file(out / "run.json", to_json(r));
  write_file(out / "timings.json", timings_json(r.timings));
  if (o.dump_residuals) write_file(out / "residuals.csv", residuals_csv(r));
  MotConfig mc;
  mc.match_thresh = o.match_thresh;
  TrajConfig tc;
  tc.align = !o.no_align;
  print_summary(clear_mot(r.output(), s, mc), trajectory_errors(r.ego_estimates(), [&] {
                  std::vector<Pose> gt;
                  for (const auto& f : s.frames) gt.push_back(f.ego_gt);
                  return gt;
                }(), tc));
  std::cout << "wrote " << (out / "run.json").string() << '\n';
  return kOk;
}

int cmd_eval(const Options& o) {
  const Scenario s = load_input(o);
  const fs::path run_path = o.run_file.empty() ? fs::path(o.out) / "run.json" : fs::path(o.run_file);
  if (!fs::exists(run_path)) throw ConfigError("run: no such file '" + run_path.string() + "'");
  const RunRecord r = run_record_from_json(read_file(run_path));
  MotConfig mc;
  mc.match_thresh = o.match_thresh;
  TrajConfig tc;
  tc.align = !o.no_align;
  std::vector<Pose> gt;
  for (const auto& f : s.frames) gt.push_back(f.ego_gt);
  const MotReport mot = clear_mot(r.output(), s, mc);
  const TrajReport traj = trajectory_errors(r.ego_estimates(), gt, tc);
  const fs::path out(o.out);
  write_file(out / "mot.json", to_json(mot));
  write_file(out / "trajectory.json", to_json(traj));
  write_file(out / "per_frame.csv", per_frame_csv(mot, traj));
  print_summary(mot, traj);
  return kOk;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("sigmas: not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("sigmas: empty list");
  return out;
}

int cmd_sweep(const Options& o) {
  const std::vector<double> sigmas = parse_list(o.sigmas);
  if (o.seeds < 1) throw ConfigError("seeds: must be >= 1");
  std::vector<std::string> variants;
  {
    std::stringstream ss(o.variants);
    std::string v;
    while (std::getline(ss, v, ';')) variants.push_back(v);
  }
  std::map<std::string, RunConfig> configs;
  for (const auto& v : variants) {
    Options vo = o;
    vo.ablate = v == "full" ? o.ablate : (o.ablate.empty() ? v : o.ablate + "," + v);
    configs[v] = make_run_config(vo);
  }
  o.sim.validate();

  std::ostringstream rows;
  rows.precision(10);
  rows << "seed,sigma,variant,mota,motp,ids,recall,precision,ape,rpe\n";
  std::map<std::pair<double, std::string>, std::vector<double>> mota, ape;
  for (int i = 0; i < o.seeds; ++i) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
    const Scenario base = generate(o.sim, seed);
    std::vector<Pose> gt;
    for (const auto& f : base.frames) gt.push_back(f.ego_gt);
    for (double sigma : sigmas) {
      NoiseSpec n;
      n.sigma_pos = sigma;
      const Scenario s = inject_noise(base, n, seed + 1000003);
      for (const auto& v : variants) {
        const RunRecord r = run(s, configs.at(v));
        const MotReport m = clear_mot(r.output(), s);
        const TrajReport t = trajectory_errors(r.ego_estimates(), gt);
        rows << seed << ',' << sigma << ',' << std::quoted(v) << ',' << m.mota << ',' << m.motp << ',' << m.ids << ','
             << m.recall << ',' << m.precision << ',' << t.ape_rmse << ',' << t.rpe_rmse << '\n';
        mota[{sigma, v}].push_back(m.mota);
        ape[{sigma, v}].push_back(t.ape_rmse);
      }
    }
  }
  std::ostringstream summary;
  summary.precision(10);
  summary << "sigma,variant,mota_mean,mota_lo,mota_hi,ape_mean\n";
  for (const auto& [key, values] : mota) {
    const MeanInterval ci = bootstrap_mean_ci(values);
    const MeanInterval a = bootstrap_mean_ci(ape.at(key));
    summary << key.first << ',' << std::quoted(key.second) << ',' << ci.mean << ',' << ci.lower << ',' << ci.upper << ','
            << a.mean << '\n';
  }
  const fs::path out(o.out);
  write_file(out / "sweep.csv", rows.str());
  write_file(out / "sweep_summary.csv", summary.str());
  std::cout << summary.str();
  return kOk;
}

int cmd_validate(const Options& o) {
  const Scenario s = load_input(o);
  const auto issues = validate_scenario(s);
  for (const auto& i : issues) std::cout << "frame " << i.frame << ": " << i.message << '\n';
  if (!issues.empty()) {
    std::cout << issues.size() << " issue(s)\n";
    return kRuntimeFailure;
  }
  std::cout << "ok: " << s.frames.size() << " frames\n";
  return kOk;
}

void add_sim_options(CLI::App& app, SimConfig& sim) {
  app.add_option("--agents", sim.num_agents, "number of agents");
  app.add_option("--frames", sim.num_frames, "number of frames");
  app.add_option("--dt", sim.dt, "frame period (s)");
  app.add_option("--parked-fraction", sim.parked_fraction, "fraction of parked agents");
  app.add_option("--lanes", sim.lanes, "number of lanes");
  app.add_option("--gap-min", sim.gap_min, "minimum bumper gap (m)");
  app.add_option("--gap-max", sim.gap_max, "maximum bumper gap (m)");
  app.add_option("--ego-speed", sim.ego_speed, "ego speed (m/s)");
  app.add_option("--sensor-range", sim.sensor_range, "sensor range (m)");
  app.add_option("--sigma-pos", sim.sigma_pos, "detection center noise (m)");
  app.add_option("--sigma-yaw", sim.sigma_yaw, "detection yaw noise (rad)");
  app.add_option("--sigma-dim", sim.sigma_dim, "detection size noise (m)");
  app.add_option("--p-miss", sim.p_miss, "detection dropout probability");
  app.add_option("--p-fp", sim.p_fp, "expected clutter detections per frame");
  app.add_option("--sigma-pt", sim.sigma_pt, "surface point noise (m)");
  app.add_option("--sigma-odom-t", sim.sigma_odom_t, "odometry translation noise per step (m)");
  app.add_option("--sigma-odom-r", sim.sigma_odom_r, "odometry rotation noise per step (rad)");
  app.add_option("--landmarks", sim.num_landmarks, "number of landmarks");
  app.add_option("--sigma-landmark", sim.sigma_landmark, "landmark observation noise (m)");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Simultaneous ego localization and 3D multi-object tracking on synthetic scenarios"};
  app.set_config("--config", "", "key = value file mirroring the long options; flags override it");
  app.require_subcommand(1);

  app.add_option("--scenario", o.scenario, "scenario file (JSON lines)");
  app.add_option("--seed", o.seed, "generation / noise seed");
  app.add_option("--k", o.k, "neighbors per star graph (K)");
  app.add_option("--L", o.L, "neighbor and candidate radius (m)");
  app.add_option("--tau", o.tau, "association gate on the combined score");
  app.add_option("--lambda", o.lambda, "criterion weights: neighborhood,spatial,shape");
  app.add_option("--window-w", o.window_w, "promotion threshold w (keyframes)");
  app.add_option("--noise-sigma", o.noise_sigma, "extra noise: a position sigma, or pos=,yaw=,dim=,ego_t=,ego_r=");
  app.add_option("--ablate", o.ablate, "comma list of spatial|neighborhood|shape|ocow|oefw");
  app.add_flag("--dump-residuals", o.dump_residuals, "write per-iteration solver costs to residuals.csv");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--keyframe-stride", o.keyframe_stride, "associate and optimize every n-th frame");
  app.add_option("--threads", o.threads, "workers for pair scoring");
  app.add_flag("--sequential", o.sequential, "run the OEFW solve on the main thread");
  app.add_option("--giou-mode", o.giou_mode, "enclosing|literal");
  app.add_option("--object-residual", o.object_residual, "object|sensor: where the detection loop is closed");
  app.add_option("--match-thresh", o.match_thresh, "evaluation center-distance gate (m)");
  app.add_flag("--no-align", o.no_align, "skip trajectory alignment before APE");
  app.add_option("--run", o.run_file, "run record to evaluate (default <out>/run.json)");
  app.add_option("--sigmas", o.sigmas, "sweep: comma list of detection position sigmas");
  app.add_option("--seeds", o.seeds, "sweep: number of consecutive seeds");
  app.add_option("--variants", o.variants, "sweep: ';'-separated ablation sets, 'full' for none");
  add_sim_options(app, o.sim);

  auto* gen = app.add_subcommand("generate", "synthesize a scenario into <out>/scenario.jsonl")->fallthrough();
  auto* run_cmd = app.add_subcommand("run", "track and optimize a scenario")->fallthrough();
  auto* eval = app.add_subcommand("eval", "score a run record against scenario ground truth")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "noise and ablation grid over generated scenarios")->fallthrough();
  auto* scenario = app.add_subcommand("scenario", "scenario utilities")->fallthrough();
  scenario->require_subcommand(1);
  auto* validate = scenario->add_subcommand("validate", "check scenario invariants")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*run_cmd) return cmd_run(o);
    if (*eval) return cmd_eval(o);
    if (*sweep) return cmd_sweep(o);
    if (*validate) return cmd_validate(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kConfigError;
}
