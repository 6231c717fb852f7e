#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("slamot_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int slamot(const std::string& args) {
  const std::string cmd =
      std::string("\"") + SLAMOT_CLI_PATH + "\" " + args + " > \"" + (workdir() / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string small_scenario() {
  const fs::path out = workdir() / "gen";
  if (!fs::exists(out / "scenario.jsonl")) {
    REQUIRE(slamot("generate --agents 8 --frames 15 --landmarks 40 --sigma-pos 0.1 --seed 3 --out \"" + out.string() +
                   "\"") == 0);
  }
  return (out / "scenario.jsonl").string();
}

}  // namespace

TEST_CASE("generate, validate, run and eval") {
  const std::string scen = small_scenario();
  CHECK(slamot("scenario validate --scenario \"" + scen + "\"") == 0);

  const fs::path out = workdir() / "run";
  CHECK(slamot("run --scenario \"" + scen + "\" --dump-residuals --out \"" + out.string() + "\"") == 0);
  CHECK(fs::exists(out / "run.json"));
  CHECK(read(out / "residuals.csv").rfind("solve,frame,iteration,stage,total_cost", 0) == 0);
  CHECK(read(workdir() / "last.log").find("MOTA") != std::string::npos);

  CHECK(slamot("eval --scenario \"" + scen + "\" --out \"" + out.string() + "\"") == 0);
  CHECK(fs::exists(out / "mot.json"));
  CHECK(fs::exists(out / "per_frame.csv"));
}

TEST_CASE("configuration errors exit with 2") {
  const std::string scen = small_scenario();
  const std::string out = " --out \"" + (workdir() / "bad").string() + "\"";
  CHECK(slamot("run --scenario \"" + scen + "\" --tau 2" + out) == 2);
  CHECK(slamot("run --scenario \"" + scen + "\" --lambda 1,1,1" + out) == 2);
  CHECK(slamot("run --scenario \"" + scen + "\" --ablate colour" + out) == 2);
  CHECK(slamot("run --scenario \"" + scen + "\" --noise-sigma pos=-1" + out) == 2);
  CHECK(slamot("run --scenario \"" + (workdir() / "missing.jsonl").string() + "\"" + out) == 2);
  CHECK(slamot("run --no-such-flag" + out) == 2);
  CHECK(slamot("generate --gap-min -1" + out) == 2);
  CHECK(slamot("") == 2);
}

TEST_CASE("runtime failures exit with 3") {
  const fs::path broken = workdir() / "broken.jsonl";
  write(broken, "{\"not\": \"a scenario\"}\n");
  CHECK(slamot("run --scenario \"" + broken.string() + "\" --out \"" + (workdir() / "broken").string() + "\"") == 3);
}

TEST_CASE("config file mirrors the flags and flags win") {
  const std::string scen = small_scenario();
  const fs::path cfg = workdir() / "slamot.cfg";
  write(cfg, "# run settings\nwindow-w = 4\ntau = 2\nL = 5.0\nlambda = \"0.3,0.4,0.3\"\nablate = shape\n");
  const std::string base = "run --config \"" + cfg.string() + "\" --scenario \"" + scen + "\" --out \"" +
                           (workdir() / "cfg").string() + "\"";
  CHECK(slamot(base) == 2);  // tau from the file is invalid
  CHECK(slamot(base + " --tau 0.5") == 0);

  write(cfg, "window-w = 0\n");
  CHECK(slamot("run --config \"" + cfg.string() + "\" --scenario \"" + scen + "\" --out \"" +
               (workdir() / "cfg").string() + "\"") == 2);
}

TEST_CASE("sweep") {
  const fs::path out = workdir() / "sweep";
  CHECK(slamot("sweep --agents 6 --frames 12 --landmarks 30 --seeds 2 --sigmas 0,0.3 --variants \"full;neighborhood,shape\" --out \"" +
               out.string() + "\"") == 0);
  const std::string rows = read(out / "sweep.csv");
  CHECK(rows.rfind("seed,sigma,variant,mota", 0) == 0);
  // a variant holding a comma stays one field
  CHECK(rows.find(",\"neighborhood,shape\",") != std::string::npos);
  CHECK(read(out / "sweep_summary.csv").find(",\"neighborhood,shape\",") != std::string::npos);
  CHECK(slamot("sweep --sigmas x --out \"" + out.string() + "\"") == 2);
}
